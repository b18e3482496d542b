#pragma once

// Shared value types for the ticketing domain. Everything here is a plain
// aggregate or a pure function; none of it touches storage or the network.

#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace stageseat {

using Id = std::int64_t;

/// UTC epoch milliseconds.
using Timestamp = std::int64_t;

inline constexpr Timestamp kMillisPerHour = 3'600'000;
inline constexpr Timestamp kMillisPerDay = 24 * kMillisPerHour;

Timestamp now_millis();

/// Calendar date, stored as days since 1970-01-01 and printed as ISO-8601.
class Date {
public:
    constexpr Date() = default;
    constexpr explicit Date(std::chrono::sys_days days) : days_(days) {}

    /// Throws Error(ParseError) unless `text` is a valid YYYY-MM-DD date.
    static Date parse(std::string_view text);
    static Date of(Timestamp t);

    [[nodiscard]] std::string to_string() const;
    [[nodiscard]] Timestamp start_millis() const;
    [[nodiscard]] std::chrono::sys_days days() const { return days_; }
    [[nodiscard]] Date plus_days(int n) const { return Date{days_ + std::chrono::days{n}}; }

    friend constexpr auto operator<=>(const Date&, const Date&) = default;

private:
    std::chrono::sys_days days_{};
};

// ---------------------------------------------------------------------------
// Money

struct Money {
    std::int64_t amount_minor = 0;
    std::string currency = "INR";

    friend bool operator==(const Money&, const Money&) = default;
};

// ---------------------------------------------------------------------------
// Policy constants of the coin economy and cancellation rules.

struct Policy {
    std::int64_t coin_value_minor = 10;
    std::int64_t earn_per_seat = 1;
    std::int64_t review_earn = 5;
    std::int64_t redeem_cap_pct = 20;
    std::int64_t cancel_cutoff_hours = 2;
    std::string currency = "INR";
};

/// subtotal - coins * coin_value_minor. Throws DiscountExceedsSubtotal when the
/// discount is larger than the subtotal, OutOfRange for negative coins.
Money apply_discount(const Money& subtotal, std::int64_t coins_redeemed,
                     std::int64_t coin_value_minor = Policy{}.coin_value_minor);

// ---------------------------------------------------------------------------
// Seats

inline constexpr int kMaxRows = 26;
inline constexpr int kMaxCols = 99;

struct SeatId {
    int row = 0;
    int col = 0;

    friend constexpr auto operator<=>(const SeatId&, const SeatId&) = default;
};

using SeatSet = std::set<SeatId>;

/// "A1" for (0,0). Throws Error(OutOfRange) outside the 26x99 label space.
std::string seat_label_encode(SeatId seat);

/// Inverse of seat_label_encode. Throws Error(ParseError) on malformed labels.
SeatId seat_label_parse(std::string_view label);

// ---------------------------------------------------------------------------
// Records

enum class Role { user, admin };

std::string_view to_string(Role role);
Role role_from_string(std::string_view text);

struct Preferences {
    bool notifications = true;
    bool recommendations = true;

    friend bool operator==(const Preferences&, const Preferences&) = default;
};

struct UserAccount {
    Id user_id = 0;
    std::string username;
    std::string email;
    std::string password_digest;
    Role role = Role::user;
    Preferences preferences;
    Timestamp created_at = 0;

    friend bool operator==(const UserAccount&, const UserAccount&) = default;
};

struct Movie {
    Id movie_id = 0;
    std::string title;
    std::string description;
    std::set<std::string> genres;
    std::string director;
    std::vector<std::string> cast;
    std::string language;
    Date release_date;
    std::optional<std::string> poster_url;
    std::optional<std::string> trailer_url;

    friend bool operator==(const Movie&, const Movie&) = default;
};

struct Venue {
    Id venue_id = 0;
    std::string name;
    std::string address;
    std::vector<std::string> amenities;
    std::vector<std::string> accessibility;
    int rows = 1;
    int cols = 1;

    [[nodiscard]] int capacity() const { return rows * cols; }
    [[nodiscard]] bool contains(SeatId s) const
    {
        return s.row >= 0 && s.row < rows && s.col >= 0 && s.col < cols;
    }

    friend bool operator==(const Venue&, const Venue&) = default;
};

struct Show {
    Id show_id = 0;
    Id movie_id = 0;
    Id venue_id = 0;
    Timestamp starts_at = 0;
    Money price_per_seat;
    SeatSet sold;

    friend bool operator==(const Show&, const Show&) = default;
};

enum class BookingStatus { active, cancelled };

std::string_view to_string(BookingStatus status);
BookingStatus booking_status_from_string(std::string_view text);

struct Booking {
    Id booking_id = 0;
    Id user_id = 0;
    Id show_id = 0;
    SeatSet seats;
    Money paid;
    std::int64_t coins_redeemed = 0;
    BookingStatus status = BookingStatus::active;
    Timestamp created_at = 0;
    // Set together when the booking is cancelled; refunded is the full paid total.
    std::optional<Timestamp> cancelled_at;
    Money refunded;

    friend bool operator==(const Booking&, const Booking&) = default;
};

enum class SentimentLabel { positive, negative, neutral };

std::string_view to_string(SentimentLabel label);
SentimentLabel sentiment_label_from_string(std::string_view text);

struct SentimentScore {
    double raw_sum = 0.0;
    double compound = 0.0;
    SentimentLabel label = SentimentLabel::neutral;
    int hit_count = 0;

    friend bool operator==(const SentimentScore&, const SentimentScore&) = default;
};

struct Review {
    Id review_id = 0;
    Id user_id = 0;
    Id movie_id = 0;
    int rating = 1;
    std::string text;
    SentimentScore sentiment;
    Timestamp created_at = 0;

    friend bool operator==(const Review&, const Review&) = default;
};

enum class CoinReason { booking_earn, review_earn, redeem, revoke_on_cancel, redeem_return };

std::string_view to_string(CoinReason reason);
CoinReason coin_reason_from_string(std::string_view text);

struct CoinTransaction {
    Id txn_id = 0;
    Id user_id = 0;
    std::int64_t delta = 0;
    CoinReason reason = CoinReason::booking_earn;
    Id ref_id = 0;
    Timestamp created_at = 0;

    friend bool operator==(const CoinTransaction&, const CoinTransaction&) = default;
};

/// Ascii lowercase copy.
std::string to_lower(std::string_view text);

} // namespace stageseat
