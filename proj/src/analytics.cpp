#include "stageseat/analytics.hpp"

#include "stageseat/error.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

namespace stageseat::analytics {

using nlohmann::json;

namespace {

void check_window(Timestamp from, Timestamp to)
{
    if (from > to)
        throw Error(ErrorCode::InvalidWindow, "report window starts after it ends");
}

bool in_window(Timestamp t, Timestamp from, Timestamp to)
{
    return t >= from && t < to;
}

std::string format_pct(double pct)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", pct);
    return buf;
}

void add(SalesRow& row, const Booking& b)
{
    row.tickets_sold += static_cast<std::int64_t>(b.seats.size());
    row.gross.amount_minor += b.paid.amount_minor;
    row.refunds.amount_minor += b.refunded.amount_minor;
    row.net.amount_minor = row.gross.amount_minor - row.refunds.amount_minor;
}

std::string join(const std::vector<std::string>& fields)
{
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i)
            line += ',';
        line += csv_field(fields[i]);
    }
    line += "\r\n";
    return line;
}

} // namespace

std::string_view to_string(GroupBy g)
{
    switch (g) {
    case GroupBy::movie: return "movie";
    case GroupBy::venue: return "venue";
    case GroupBy::day: return "day";
    }
    return "movie";
}

GroupBy group_by_from_string(std::string_view text)
{
    for (auto g : {GroupBy::movie, GroupBy::venue, GroupBy::day}) {
        if (to_string(g) == text)
            return g;
    }
    throw Error(ErrorCode::BadRequest, "unknown group_by '" + std::string(text) + "'");
}

SalesReport sales_report(const store::Store& store, Timestamp from, Timestamp to, GroupBy group_by)
{
    check_window(from, to);
    return store.read([&](const store::View& v) {
        SalesReport report;
        report.from = from;
        report.to = to;
        report.group_by = group_by;

        // Ordered keys: numeric ids or ISO dates both sort naturally here.
        std::map<std::pair<Id, std::string>, SalesRow> grouped;
        std::string currency = Policy{}.currency;
        for (const auto& [id, row] : v.all<Booking>()) {
            const Booking& b = row.value;
            if (!in_window(b.created_at, from, to))
                continue;
            currency = b.paid.currency;
            const Show& show = *v.find<Show>(b.show_id);
            std::pair<Id, std::string> key;
            std::string label;
            switch (group_by) {
            case GroupBy::movie:
                key = {show.movie_id, {}};
                label = v.find<Movie>(show.movie_id)->title;
                break;
            case GroupBy::venue:
                key = {show.venue_id, {}};
                label = v.find<Venue>(show.venue_id)->name;
                break;
            case GroupBy::day:
                key = {0, Date::of(b.created_at).to_string()};
                label = key.second;
                break;
            }
            auto [it, inserted] = grouped.try_emplace(key);
            if (inserted) {
                it->second.key = group_by == GroupBy::day ? key.second : std::to_string(key.first);
                it->second.label = label;
                it->second.gross.currency = it->second.refunds.currency = it->second.net.currency = b.paid.currency;
            }
            add(it->second, b);
            add(report.totals, b);
        }
        report.totals.key = "total";
        report.totals.label = "total";
        report.totals.gross.currency = report.totals.refunds.currency = report.totals.net.currency = currency;
        for (auto& [key, row] : grouped)
            report.rows.push_back(std::move(row));
        return report;
    });
}

OccupancyReport occupancy_report(const store::Store& store, Id venue_id, Date date)
{
    return store.read([&](const store::View& v) {
        const Venue* venue = v.find<Venue>(venue_id);
        if (!venue)
            throw Error(ErrorCode::UnknownVenue, "venue " + std::to_string(venue_id) + " does not exist");
        OccupancyReport report;
        report.venue_id = venue_id;
        report.date = date;
        for (Id sid : v.shows_of_venue(venue_id)) {
            const Show& s = *v.find<Show>(sid);
            if (Date::of(s.starts_at) != date)
                continue;
            OccupancyRow row;
            row.show_id = sid;
            row.starts_at = s.starts_at;
            row.capacity = venue->capacity();
            row.sold = static_cast<int>(s.sold.size());
            row.occupancy_pct = 100.0 * row.sold / row.capacity;
            report.rows.push_back(row);
        }
        std::sort(report.rows.begin(), report.rows.end(), [](const OccupancyRow& a, const OccupancyRow& b) {
            return a.starts_at != b.starts_at ? a.starts_at < b.starts_at : a.show_id < b.show_id;
        });
        return report;
    });
}

ActivityReport activity_report(const store::Store& store, Timestamp from, Timestamp to)
{
    check_window(from, to);
    return store.read([&](const store::View& v) {
        std::map<Id, ActivityRow> rows;
        auto row_for = [&](Id user_id) -> ActivityRow& {
            auto [it, inserted] = rows.try_emplace(user_id);
            if (inserted) {
                it->second.user_id = user_id;
                it->second.username = v.find<UserAccount>(user_id)->username;
            }
            return it->second;
        };
        for (const auto& [id, row] : v.all<Booking>()) {
            const Booking& b = row.value;
            if (in_window(b.created_at, from, to))
                ++row_for(b.user_id).bookings;
            if (b.cancelled_at && in_window(*b.cancelled_at, from, to))
                ++row_for(b.user_id).cancellations;
        }
        for (const auto& [id, row] : v.all<Review>()) {
            if (in_window(row.value.created_at, from, to))
                ++row_for(row.value.user_id).reviews;
        }
        for (const auto& [id, row] : v.all<CoinTransaction>()) {
            const CoinTransaction& c = row.value;
            if (!in_window(c.created_at, from, to))
                continue;
            ActivityRow& r = row_for(c.user_id);
            switch (c.reason) {
            case CoinReason::booking_earn:
            case CoinReason::review_earn: r.coins_earned += c.delta; break;
            case CoinReason::redeem: r.coins_redeemed -= c.delta; break;
            case CoinReason::redeem_return: r.coins_returned += c.delta; break;
            case CoinReason::revoke_on_cancel: r.coins_revoked -= c.delta; break;
            }
        }
        ActivityReport report;
        report.from = from;
        report.to = to;
        for (auto& [uid, row] : rows) {
            const bool active = row.bookings || row.cancellations || row.reviews || row.coins_earned ||
                                row.coins_redeemed || row.coins_returned || row.coins_revoked;
            if (active)
                report.rows.push_back(std::move(row));
        }
        return report;
    });
}

SentimentReport sentiment_report(const store::Store& store, Id movie_id)
{
    return store.read([&](const store::View& v) {
        if (!v.find<Movie>(movie_id))
            throw Error(ErrorCode::UnknownMovie, "movie " + std::to_string(movie_id) + " does not exist");
        std::vector<Review> reviews;
        std::vector<SentimentScore> scores;
        for (Id rid : v.reviews_of_movie(movie_id)) {
            reviews.push_back(*v.find<Review>(rid));
            scores.push_back(reviews.back().sentiment);
        }
        SentimentReport report;
        report.movie_id = movie_id;
        report.aggregate = sentiment::aggregate_reviews(scores);
        std::sort(reviews.begin(), reviews.end(), [](const Review& a, const Review& b) {
            if (a.sentiment.compound != b.sentiment.compound)
                return a.sentiment.compound < b.sentiment.compound;
            return a.review_id < b.review_id;
        });
        if (reviews.size() > kMostNegativeCap)
            reviews.resize(kMostNegativeCap);
        report.most_negative = std::move(reviews);
        return report;
    });
}

// --- serialization ---------------------------------------------------------

namespace {

json sales_row_json(const SalesRow& r)
{
    return json{{"key", r.key},
                {"label", r.label},
                {"tickets_sold", r.tickets_sold},
                {"gross_minor", r.gross.amount_minor},
                {"refunds_minor", r.refunds.amount_minor},
                {"net_minor", r.net.amount_minor},
                {"currency", r.gross.currency}};
}

json aggregate_json(const sentiment::AggregateSentiment& a)
{
    return json{{"n_reviews", a.n_reviews},
                {"n_positive", a.n_positive},
                {"n_negative", a.n_negative},
                {"n_neutral", a.n_neutral},
                {"mean_compound", a.mean_compound}};
}

} // namespace

json to_json(const SalesReport& r)
{
    json rows = json::array();
    for (const auto& row : r.rows)
        rows.push_back(sales_row_json(row));
    return json{{"report", "sales"},
                {"from", r.from},
                {"to", r.to},
                {"group_by", to_string(r.group_by)},
                {"rows", rows},
                {"totals", sales_row_json(r.totals)}};
}

json to_json(const OccupancyReport& r)
{
    json rows = json::array();
    for (const auto& row : r.rows)
        rows.push_back(json{{"show_id", row.show_id},
                            {"starts_at", row.starts_at},
                            {"capacity", row.capacity},
                            {"sold", row.sold},
                            {"occupancy_pct", row.occupancy_pct}});
    return json{{"report", "occupancy"}, {"venue_id", r.venue_id}, {"date", r.date.to_string()}, {"rows", rows}};
}

json to_json(const ActivityReport& r)
{
    json rows = json::array();
    for (const auto& row : r.rows)
        rows.push_back(json{{"user_id", row.user_id},
                            {"username", row.username},
                            {"bookings", row.bookings},
                            {"cancellations", row.cancellations},
                            {"reviews", row.reviews},
                            {"coins_earned", row.coins_earned},
                            {"coins_redeemed", row.coins_redeemed},
                            {"coins_returned", row.coins_returned},
                            {"coins_revoked", row.coins_revoked}});
    return json{{"report", "activity"}, {"from", r.from}, {"to", r.to}, {"rows", rows}};
}

json to_json(const SentimentReport& r)
{
    json worst = json::array();
    for (const auto& rev : r.most_negative)
        worst.push_back(json{{"review_id", rev.review_id},
                             {"user_id", rev.user_id},
                             {"rating", rev.rating},
                             {"text", rev.text},
                             {"compound", rev.sentiment.compound},
                             {"label", to_string(rev.sentiment.label)}});
    return json{{"report", "sentiment"},
                {"movie_id", r.movie_id},
                {"aggregate", aggregate_json(r.aggregate)},
                {"most_negative", worst}};
}

std::string csv_field(std::string_view value)
{
    if (value.find_first_of(",\"\r\n") == std::string_view::npos)
        return std::string(value);
    std::string out = "\"";
    for (char c : value) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string to_csv(const SalesReport& r)
{
    std::string out = join({"key", "label", "tickets_sold", "gross_minor", "refunds_minor", "net_minor", "currency"});
    auto line = [&](const SalesRow& row) {
        out += join({row.key, row.label, std::to_string(row.tickets_sold), std::to_string(row.gross.amount_minor),
                     std::to_string(row.refunds.amount_minor), std::to_string(row.net.amount_minor),
                     row.gross.currency});
    };
    for (const auto& row : r.rows)
        line(row);
    line(r.totals);
    return out;
}

std::string to_csv(const OccupancyReport& r)
{
    std::string out = join({"show_id", "starts_at", "capacity", "sold", "occupancy_pct"});
    for (const auto& row : r.rows)
        out += join({std::to_string(row.show_id), std::to_string(row.starts_at), std::to_string(row.capacity),
                     std::to_string(row.sold), format_pct(row.occupancy_pct)});
    return out;
}

std::string to_csv(const ActivityReport& r)
{
    std::string out = join({"user_id", "username", "bookings", "cancellations", "reviews", "coins_earned",
                            "coins_redeemed", "coins_returned", "coins_revoked"});
    for (const auto& row : r.rows)
        out += join({std::to_string(row.user_id), row.username, std::to_string(row.bookings),
                     std::to_string(row.cancellations), std::to_string(row.reviews),
                     std::to_string(row.coins_earned), std::to_string(row.coins_redeemed),
                     std::to_string(row.coins_returned), std::to_string(row.coins_revoked)});
    return out;
}

std::string to_csv(const SentimentReport& r)
{
    std::ostringstream compound;
    compound.precision(6);
    compound << std::fixed << r.aggregate.mean_compound;
    std::string out = join({"section", "review_id", "rating", "compound", "label", "text"});
    out += join({"aggregate", "", std::to_string(r.aggregate.n_reviews), compound.str(),
                 std::to_string(r.aggregate.n_positive) + "/" + std::to_string(r.aggregate.n_negative) + "/" +
                     std::to_string(r.aggregate.n_neutral),
                 ""});
    for (const auto& rev : r.most_negative) {
        std::ostringstream c;
        c.precision(6);
        c << std::fixed << rev.sentiment.compound;
        out += join({"most_negative", std::to_string(rev.review_id), std::to_string(rev.rating), c.str(),
                     std::string(to_string(rev.sentiment.label)), rev.text});
    }
    return out;
}

} // namespace stageseat::analytics
