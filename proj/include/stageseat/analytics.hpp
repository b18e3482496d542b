#pragma once

// Admin reports. Every report is a pure function of committed store state, and
// serializes deterministically to JSON or CSV.

#include "stageseat/domain.hpp"
#include "stageseat/sentiment.hpp"
#include "stageseat/store.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace stageseat::analytics {

enum class GroupBy { movie, venue, day };

std::string_view to_string(GroupBy g);
GroupBy group_by_from_string(std::string_view text);

struct SalesRow {
    std::string key;   // movie id, venue id or ISO day
    std::string label; // title, venue name or ISO day
    std::int64_t tickets_sold = 0;
    Money gross;
    Money refunds;
    Money net;
};

struct SalesReport {
    Timestamp from = 0;
    Timestamp to = 0;
    GroupBy group_by = GroupBy::movie;
    std::vector<SalesRow> rows;
    SalesRow totals;
};

/// Bookings created in [from, to). Cancelled bookings stay in gross and
/// their refund is counted under refunds. Throws InvalidWindow if from > to.
SalesReport sales_report(const store::Store& store, Timestamp from, Timestamp to, GroupBy group_by);

struct OccupancyRow {
    Id show_id = 0;
    Timestamp starts_at = 0;
    int capacity = 0;
    int sold = 0;
    double occupancy_pct = 0.0;
};

struct OccupancyReport {
    Id venue_id = 0;
    Date date;
    std::vector<OccupancyRow> rows;
};

OccupancyReport occupancy_report(const store::Store& store, Id venue_id, Date date);

struct ActivityRow {
    Id user_id = 0;
    std::string username;
    int bookings = 0;
    int cancellations = 0;
    int reviews = 0;
    std::int64_t coins_earned = 0;
    std::int64_t coins_redeemed = 0;
    std::int64_t coins_returned = 0;
    std::int64_t coins_revoked = 0;
};

struct ActivityReport {
    Timestamp from = 0;
    Timestamp to = 0;
    std::vector<ActivityRow> rows; // users with no activity are omitted
};

/// Events in [from, to): bookings created, cancellations made, reviews
/// written and ledger entries by reason. earned - redeemed + returned -
/// revoked equals the user's ledger sum over the window.
ActivityReport activity_report(const store::Store& store, Timestamp from, Timestamp to);

inline constexpr std::size_t kMostNegativeCap = 5;

struct SentimentReport {
    Id movie_id = 0;
    sentiment::AggregateSentiment aggregate;
    std::vector<Review> most_negative; // lowest compound first, ties by review id
};

SentimentReport sentiment_report(const store::Store& store, Id movie_id);

nlohmann::json to_json(const SalesReport& r);
nlohmann::json to_json(const OccupancyReport& r);
nlohmann::json to_json(const ActivityReport& r);
nlohmann::json to_json(const SentimentReport& r);

std::string to_csv(const SalesReport& r);
std::string to_csv(const OccupancyReport& r);
std::string to_csv(const ActivityReport& r);
std::string to_csv(const SentimentReport& r);

/// RFC 4180 field quoting: quoted only when the field holds a comma, quote,
/// CR or LF; embedded quotes doubled.
std::string csv_field(std::string_view value);

} // namespace stageseat::analytics
