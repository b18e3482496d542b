#include "stageseat/domain.hpp"

#include "stageseat/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>

namespace stageseat {

Timestamp now_millis()
{
    using namespace std::chrono;
    return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

Date Date::parse(std::string_view text)
{
    auto fail = [&] { return Error(ErrorCode::ParseError, "invalid date '" + std::string(text) + "'"); };
    if (text.size() != 10 || text[4] != '-' || text[7] != '-')
        throw fail();
    auto number = [&](std::size_t pos, std::size_t len) {
        int value = 0;
        auto first = text.data() + pos;
        auto [ptr, ec] = std::from_chars(first, first + len, value);
        if (ec != std::errc{} || ptr != first + len)
            throw fail();
        return value;
    };
    const int y = number(0, 4);
    const int m = number(5, 2);
    const int d = number(8, 2);
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                          std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok())
        throw fail();
    return Date{std::chrono::sys_days{ymd}};
}

Date Date::of(Timestamp t)
{
    using namespace std::chrono;
    const auto tp = sys_time<milliseconds>{milliseconds{t}};
    return Date{floor<std::chrono::days>(tp)};
}

std::string Date::to_string() const
{
    const std::chrono::year_month_day ymd{days_};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

Timestamp Date::start_millis() const
{
    return static_cast<Timestamp>(days_.time_since_epoch().count()) * kMillisPerDay;
}

Money apply_discount(const Money& subtotal, std::int64_t coins_redeemed, std::int64_t coin_value_minor)
{
    if (coins_redeemed < 0)
        throw Error(ErrorCode::OutOfRange, "coins_redeemed must be non-negative");
    const std::int64_t discount = coins_redeemed * coin_value_minor;
    if (discount > subtotal.amount_minor)
        throw Error(ErrorCode::DiscountExceedsSubtotal,
                    "discount " + std::to_string(discount) + " exceeds subtotal " +
                        std::to_string(subtotal.amount_minor));
    return Money{subtotal.amount_minor - discount, subtotal.currency};
}

std::string seat_label_encode(SeatId seat)
{
    if (seat.row < 0 || seat.row >= kMaxRows || seat.col < 0 || seat.col >= kMaxCols)
        throw Error(ErrorCode::OutOfRange, "seat (" + std::to_string(seat.row) + "," + std::to_string(seat.col) +
                                              ") outside label space");
    std::string label(1, static_cast<char>('A' + seat.row));
    label += std::to_string(seat.col + 1);
    return label;
}

SeatId seat_label_parse(std::string_view label)
{
    auto fail = [&] { return Error(ErrorCode::ParseError, "malformed seat label '" + std::string(label) + "'"); };
    if (label.size() < 2 || label.size() > 3)
        throw fail();
    const char letter = label.front();
    if (letter < 'A' || letter > 'Z')
        throw fail();
    const auto digits = label.substr(1);
    // No sign, no leading zero: keeps the codec a bijection.
    if (digits.front() == '0' || !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; }))
        throw fail();
    int number = 0;
    std::from_chars(digits.data(), digits.data() + digits.size(), number);
    if (number < 1 || number > kMaxCols)
        throw fail();
    return SeatId{letter - 'A', number - 1};
}

std::string_view to_string(Role role)
{
    return role == Role::admin ? "admin" : "user";
}

Role role_from_string(std::string_view text)
{
    if (text == "user")
        return Role::user;
    if (text == "admin")
        return Role::admin;
    throw Error(ErrorCode::ParseError, "unknown role '" + std::string(text) + "'");
}

std::string_view to_string(BookingStatus status)
{
    return status == BookingStatus::active ? "active" : "cancelled";
}

BookingStatus booking_status_from_string(std::string_view text)
{
    if (text == "active")
        return BookingStatus::active;
    if (text == "cancelled")
        return BookingStatus::cancelled;
    throw Error(ErrorCode::ParseError, "unknown booking status '" + std::string(text) + "'");
}

std::string_view to_string(SentimentLabel label)
{
    switch (label) {
    case SentimentLabel::positive: return "positive";
    case SentimentLabel::negative: return "negative";
    case SentimentLabel::neutral: return "neutral";
    }
    return "neutral";
}

SentimentLabel sentiment_label_from_string(std::string_view text)
{
    if (text == "positive")
        return SentimentLabel::positive;
    if (text == "negative")
        return SentimentLabel::negative;
    if (text == "neutral")
        return SentimentLabel::neutral;
    throw Error(ErrorCode::ParseError, "unknown sentiment label '" + std::string(text) + "'");
}

std::string_view to_string(CoinReason reason)
{
    switch (reason) {
    case CoinReason::booking_earn: return "booking_earn";
    case CoinReason::review_earn: return "review_earn";
    case CoinReason::redeem: return "redeem";
    case CoinReason::revoke_on_cancel: return "revoke_on_cancel";
    case CoinReason::redeem_return: return "redeem_return";
    }
    return "booking_earn";
}

CoinReason coin_reason_from_string(std::string_view text)
{
    for (auto r : {CoinReason::booking_earn, CoinReason::review_earn, CoinReason::redeem,
                   CoinReason::revoke_on_cancel, CoinReason::redeem_return}) {
        if (to_string(r) == text)
            return r;
    }
    throw Error(ErrorCode::ParseError, "unknown coin reason '" + std::string(text) + "'");
}

std::string to_lower(std::string_view text)
{
    std::string out(text);
    for (char& c : out)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

} // namespace stageseat
