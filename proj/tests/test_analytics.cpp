#include "stageseat/analytics.hpp"
#include "stageseat/booking.hpp"
#include "stageseat/error.hpp"
#include "stageseat/seed.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <map>

using namespace stageseat;
using namespace stageseat::analytics;
using stageseat::fixture::add_movie;
using stageseat::fixture::add_user;
using stageseat::fixture::add_venue;
using stageseat::fixture::kEpoch;
using stageseat::fixture::seats;

namespace {

ErrorCode code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an Error";
    return ErrorCode::Internal;
}

struct World {
    store::Store s;
    booking::BookingEngine engine{s, Policy{}};
    Id alice, movie, venue;
    Show show;
    World()
    {
        alice = add_user(s, "alice");
        movie = add_movie(s, "Godfather");
        venue = add_venue(s, 5, 10);
        show = engine.create_show(movie, venue, kEpoch + 2 * kMillisPerDay, Money{25000, "INR"}, kEpoch);
    }
};

struct Seeded {
    store::Store s;
    booking::BookingEngine engine{s, Policy{}};
    Seeded()
    {
        seed::SeedOptions o;
        o.movies = 30;
        o.venues = 3;
        o.users = 25;
        o.bookings = 400;
        o.reviews = 120;
        o.days = 5;
        o.seed = 3;
        o.base_date = Date::parse("2026-02-01");
        seed::generate(s, engine, fixture::seed_lexicon(), o, "not-a-real-digest");
    }
};

struct Fold {
    std::int64_t tickets = 0, gross = 0, refunds = 0;
};

} // namespace

TEST(Sales, Examples)
{
    World w;
    const Timestamp from = kEpoch, to = kEpoch + kMillisPerDay;
    EXPECT_TRUE(sales_report(w.s, from, to, GroupBy::movie).rows.empty());
    EXPECT_TRUE(sales_report(w.s, from, from, GroupBy::movie).rows.empty());
    EXPECT_EQ(code_of([&] { sales_report(w.s, to, from, GroupBy::movie); }), ErrorCode::InvalidWindow);

    const auto b = w.engine.book_seats(w.alice, w.show.show_id, seats({"A1", "A2"}), 0, kEpoch + 10);
    auto r = sales_report(w.s, from, to, GroupBy::movie);
    ASSERT_EQ(r.rows.size(), 1u);
    EXPECT_EQ(r.rows[0].key, std::to_string(w.movie));
    EXPECT_EQ(r.rows[0].label, "Godfather");
    EXPECT_EQ(r.rows[0].tickets_sold, 2);
    EXPECT_EQ(r.rows[0].gross.amount_minor, 50000);
    EXPECT_EQ(r.rows[0].net.amount_minor, 50000);
    EXPECT_EQ(r.totals.gross.amount_minor, 50000);
    // Half-open: a window ending at the booking time excludes it.
    EXPECT_TRUE(sales_report(w.s, from, kEpoch + 10, GroupBy::movie).rows.empty());

    w.engine.cancel_booking(w.alice, b.booking_id, kEpoch + 20);
    r = sales_report(w.s, from, to, GroupBy::venue);
    ASSERT_EQ(r.rows.size(), 1u);
    EXPECT_EQ(r.rows[0].label, "Plaza");
    EXPECT_EQ(r.rows[0].gross.amount_minor, 50000);
    EXPECT_EQ(r.rows[0].refunds.amount_minor, 50000);
    EXPECT_EQ(r.rows[0].net.amount_minor, 0);

    r = sales_report(w.s, from, to, GroupBy::day);
    ASSERT_EQ(r.rows.size(), 1u);
    EXPECT_EQ(r.rows[0].key, "2026-03-01");
    EXPECT_EQ(code_of([] { group_by_from_string("week"); }), ErrorCode::BadRequest);
}

TEST(Sales, TotalsMatchIndependentFold)
{
    Seeded w;
    const Timestamp from = Date::parse("2026-01-05").start_millis();
    const Timestamp to = Date::parse("2026-01-20").start_millis();

    std::map<std::string, Fold> by_movie, by_day;
    Fold all;
    w.s.read([&](const store::View& v) {
        for (const auto& [id, row] : v.all<Booking>()) {
            const Booking& b = row.value;
            if (b.created_at < from || b.created_at >= to)
                continue;
            const Id movie = v.all<Show>().at(b.show_id).value.movie_id;
            for (auto* f : {&by_movie[std::to_string(movie)], &by_day[Date::of(b.created_at).to_string()], &all}) {
                f->tickets += static_cast<std::int64_t>(b.seats.size());
                f->gross += b.paid.amount_minor;
                f->refunds += b.status == BookingStatus::cancelled ? b.refunded.amount_minor : 0;
            }
        }
        return 0;
    });
    ASSERT_GT(all.tickets, 0);
    ASSERT_GT(all.refunds, 0) << "seeded data should include cancellations";

    for (auto g : {GroupBy::movie, GroupBy::venue, GroupBy::day}) {
        const auto r = sales_report(w.s, from, to, g);
        EXPECT_EQ(r.totals.tickets_sold, all.tickets);
        EXPECT_EQ(r.totals.gross.amount_minor, all.gross);
        EXPECT_EQ(r.totals.refunds.amount_minor, all.refunds);
        EXPECT_EQ(r.totals.net.amount_minor, all.gross - all.refunds);
        std::int64_t row_sum = 0;
        for (const auto& row : r.rows)
            row_sum += row.net.amount_minor;
        EXPECT_EQ(row_sum, all.gross - all.refunds);
    }
    const auto movie_rows = sales_report(w.s, from, to, GroupBy::movie).rows;
    EXPECT_EQ(movie_rows.size(), by_movie.size());
    for (const auto& row : movie_rows) {
        EXPECT_EQ(row.tickets_sold, by_movie.at(row.key).tickets);
        EXPECT_EQ(row.gross.amount_minor, by_movie.at(row.key).gross);
    }
    const auto day_rows = sales_report(w.s, from, to, GroupBy::day).rows;
    ASSERT_EQ(day_rows.size(), by_day.size());
    auto it = by_day.begin();
    for (const auto& row : day_rows) {
        EXPECT_EQ(row.key, it->first);
        EXPECT_EQ(row.refunds.amount_minor, it->second.refunds);
        ++it;
    }
}

TEST(Occupancy, Examples)
{
    World w;
    const Date day = Date::of(w.show.starts_at);
    auto r = occupancy_report(w.s, w.venue, day);
    ASSERT_EQ(r.rows.size(), 1u);
    EXPECT_EQ(r.rows[0].capacity, 50);
    EXPECT_DOUBLE_EQ(r.rows[0].occupancy_pct, 0.0);

    SeatSet half;
    for (int c = 0; c < 10; ++c)
        for (int row = 0; row < 2; ++row)
            half.insert(SeatId{row, c});
    for (int c = 0; c < 5; ++c)
        half.insert(SeatId{2, c});
    w.engine.book_seats(w.alice, w.show.show_id, half, 0, kEpoch);
    r = occupancy_report(w.s, w.venue, day);
    EXPECT_EQ(r.rows[0].sold, 25);
    EXPECT_DOUBLE_EQ(r.rows[0].occupancy_pct, 50.0);

    SeatSet rest;
    for (int row = 0; row < 5; ++row)
        for (int c = 0; c < 10; ++c)
            if (!half.contains(SeatId{row, c}))
                rest.insert(SeatId{row, c});
    w.engine.book_seats(w.alice, w.show.show_id, rest, 0, kEpoch);
    r = occupancy_report(w.s, w.venue, day);
    EXPECT_DOUBLE_EQ(r.rows[0].occupancy_pct, 100.0);
    EXPECT_EQ(code_of([&] { w.engine.book_seats(w.alice, w.show.show_id, seats({"A1"}), 0, kEpoch); }),
              ErrorCode::Houseful);

    EXPECT_TRUE(occupancy_report(w.s, w.venue, day.plus_days(1)).rows.empty());
    EXPECT_EQ(code_of([&] { occupancy_report(w.s, 99, day); }), ErrorCode::UnknownVenue);
}

TEST(Occupancy, PercentInRangeAndHundredIffHouseful)
{
    Seeded w;
    w.s.read([&](const store::View& v) {
        for (const auto& [vid, venue] : v.all<Venue>()) {
            for (int d = 0; d < 5; ++d) {
                for (const auto& row : occupancy_report(w.s, vid, Date::parse("2026-02-01").plus_days(d)).rows) {
                    EXPECT_GE(row.occupancy_pct, 0.0);
                    EXPECT_LE(row.occupancy_pct, 100.0);
                    EXPECT_EQ(row.occupancy_pct == 100.0, row.sold == row.capacity);
                }
            }
        }
        return 0;
    });
}

TEST(Activity, ConsistentWithLedger)
{
    Seeded w;
    const Timestamp from = Date::parse("2026-01-01").start_millis();
    const Timestamp to = Date::parse("2026-01-15").start_millis();
    const auto r = activity_report(w.s, from, to);
    ASSERT_FALSE(r.rows.empty());

    std::map<Id, std::int64_t> ledger;
    std::map<Id, int> bookings, cancels, reviews;
    w.s.read([&](const store::View& v) {
        for (const auto& [id, row] : v.all<CoinTransaction>())
            if (row.value.created_at >= from && row.value.created_at < to)
                ledger[row.value.user_id] += row.value.delta;
        for (const auto& [id, row] : v.all<Booking>()) {
            if (row.value.created_at >= from && row.value.created_at < to)
                ++bookings[row.value.user_id];
            if (row.value.cancelled_at && *row.value.cancelled_at >= from && *row.value.cancelled_at < to)
                ++cancels[row.value.user_id];
        }
        for (const auto& [id, row] : v.all<Review>())
            if (row.value.created_at >= from && row.value.created_at < to)
                ++reviews[row.value.user_id];
        return 0;
    });
    for (const auto& row : r.rows) {
        EXPECT_EQ(row.coins_earned - row.coins_redeemed + row.coins_returned - row.coins_revoked, ledger[row.user_id]);
        EXPECT_EQ(row.bookings, bookings[row.user_id]);
        EXPECT_EQ(row.cancellations, cancels[row.user_id]);
        EXPECT_EQ(row.reviews, reviews[row.user_id]);
        EXPECT_GE(row.coins_redeemed, 0);
    }
    EXPECT_EQ(code_of([&] { activity_report(w.s, to, from); }), ErrorCode::InvalidWindow);
}

TEST(Activity, WorkedExample)
{
    World w;
    const auto b = w.engine.book_seats(w.alice, w.show.show_id, seats({"A1", "A2"}), 0, kEpoch);
    w.engine.post_review(w.alice, w.movie, 5, "great", SentimentScore{}, kEpoch + 1);
    w.engine.cancel_booking(w.alice, b.booking_id, kEpoch + 2);
    add_user(w.s, "idle");
    const auto r = activity_report(w.s, kEpoch, kEpoch + kMillisPerDay);
    ASSERT_EQ(r.rows.size(), 1u);
    EXPECT_EQ(r.rows[0].username, "alice");
    EXPECT_EQ(r.rows[0].bookings, 1);
    EXPECT_EQ(r.rows[0].cancellations, 1);
    EXPECT_EQ(r.rows[0].reviews, 1);
    EXPECT_EQ(r.rows[0].coins_earned, 7);
    EXPECT_EQ(r.rows[0].coins_revoked, 2);
}

TEST(SentimentReportTest, Examples)
{
    World w;
    EXPECT_EQ(code_of([&] { sentiment_report(w.s, 99); }), ErrorCode::UnknownMovie);
    auto r = sentiment_report(w.s, w.movie);
    EXPECT_EQ(r.aggregate.n_reviews, 0);
    EXPECT_TRUE(r.most_negative.empty());

    std::vector<Id> users;
    for (int i = 0; i < 10; ++i)
        users.push_back(add_user(w.s, "r" + std::to_string(i)));
    const double compounds[] = {0.44, -0.33, 0.0};
    for (int i = 0; i < 3; ++i) {
        SentimentScore sc{0, compounds[i], sentiment::classify(compounds[i]), 0};
        w.engine.post_review(users[i], w.movie, 3, "", sc, kEpoch);
    }
    r = sentiment_report(w.s, w.movie);
    EXPECT_EQ(r.aggregate.n_positive, 1);
    EXPECT_EQ(r.aggregate.n_negative, 1);
    EXPECT_EQ(r.aggregate.n_neutral, 1);
    ASSERT_FALSE(r.most_negative.empty());
    EXPECT_DOUBLE_EQ(r.most_negative.front().sentiment.compound, -0.33);

    const Id other = add_movie(w.s, "Heat");
    for (int i = 0; i < 7; ++i) {
        const double c = i < 2 ? -0.9 : -0.1 * i;
        w.engine.post_review(users[i], other, 1, "", SentimentScore{0, c, SentimentLabel::negative, 1}, kEpoch);
    }
    r = sentiment_report(w.s, other);
    ASSERT_EQ(r.most_negative.size(), kMostNegativeCap);
    EXPECT_LT(r.most_negative[0].review_id, r.most_negative[1].review_id);
    EXPECT_DOUBLE_EQ(r.most_negative[0].sentiment.compound, -0.9);
    for (std::size_t i = 1; i < r.most_negative.size(); ++i)
        EXPECT_LE(r.most_negative[i - 1].sentiment.compound, r.most_negative[i].sentiment.compound);
}

TEST(Csv, FieldQuoting)
{
    EXPECT_EQ(csv_field("plain"), "plain");
    EXPECT_EQ(csv_field(""), "");
    EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
    EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    EXPECT_EQ(csv_field("line\nbreak"), "\"line\nbreak\"");
    EXPECT_EQ(csv_field("cr\r"), "\"cr\r\"");
    EXPECT_EQ(csv_field(" spaced "), " spaced ");
}

TEST(Csv, SalesLayout)
{
    World w;
    Movie m;
    m.title = "Comma, \"Quoted\"";
    m.genres = {"drama"};
    const Id mid = fixture::add_movie(w.s, m);
    const auto show = w.engine.create_show(mid, w.venue, kEpoch + kMillisPerDay, Money{100, "INR"}, kEpoch);
    w.engine.book_seats(w.alice, show.show_id, seats({"A1"}), 0, kEpoch);
    const auto csv = to_csv(sales_report(w.s, kEpoch, kEpoch + 1, GroupBy::movie));
    EXPECT_NE(csv.find("\"Comma, \"\"Quoted\"\"\""), std::string::npos) << csv;
    EXPECT_NE(csv.find("\r\n"), std::string::npos);
    const auto first_line = csv.substr(0, csv.find("\r\n"));
    EXPECT_EQ(first_line.find('"'), std::string::npos);
}

TEST(Reports, IdenticalStateGivesIdenticalBytes)
{
    Seeded a;
    Seeded b;
    const Timestamp from = Date::parse("2026-01-01").start_millis();
    const Timestamp to = Date::parse("2026-02-10").start_millis();
    for (auto g : {GroupBy::movie, GroupBy::venue, GroupBy::day}) {
        EXPECT_EQ(to_csv(sales_report(a.s, from, to, g)), to_csv(sales_report(b.s, from, to, g)));
        EXPECT_EQ(to_json(sales_report(a.s, from, to, g)).dump(), to_json(sales_report(b.s, from, to, g)).dump());
    }
    EXPECT_EQ(to_csv(activity_report(a.s, from, to)), to_csv(activity_report(b.s, from, to)));
    EXPECT_EQ(to_json(occupancy_report(a.s, 1, Date::parse("2026-02-02"))).dump(),
              to_json(occupancy_report(b.s, 1, Date::parse("2026-02-02"))).dump());
    EXPECT_EQ(to_csv(sentiment_report(a.s, 1)), to_csv(sentiment_report(b.s, 1)));
}
