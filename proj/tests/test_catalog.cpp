#include "stageseat/booking.hpp"
#include "stageseat/catalog.hpp"
#include "stageseat/error.hpp"
#include "stageseat/seed.hpp"

#include "oracles.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace stageseat;
using namespace stageseat::catalog;
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

std::vector<Id> ids_of(const std::vector<Movie>& movies)
{
    std::vector<Id> out;
    for (const auto& m : movies)
        out.push_back(m.movie_id);
    return out;
}

std::vector<Id> ids_of(const std::vector<RecommendationScore>& recs)
{
    std::vector<Id> out;
    for (const auto& r : recs)
        out.push_back(r.movie_id);
    return out;
}

Id add_review(store::Store& s, Id user, Id movie, int rating, double compound)
{
    Review r;
    r.user_id = user;
    r.movie_id = movie;
    r.rating = rating;
    r.sentiment.compound = compound;
    r.sentiment.label = sentiment::classify(compound);
    return s.transact({store::Insert{r, std::nullopt}}).ids.at(0);
}

// 100-movie generated catalog with bookings and reviews.
struct Seeded {
    store::Store s;
    booking::BookingEngine engine{s, Policy{}};
    seed::SeedCounts counts;
    Seeded()
    {
        seed::SeedOptions o;
        o.movies = 100;
        o.venues = 4;
        o.users = 40;
        o.bookings = 300;
        o.reviews = 250;
        o.days = 4;
        o.seed = 7;
        o.base_date = Date::parse("2025-06-01");
        counts = seed::generate(s, engine, fixture::seed_lexicon(), o, "not-a-real-digest");
    }
    std::vector<Movie> movies() const
    {
        return s.read([](const store::View& v) {
            std::vector<Movie> out;
            for (const auto& [id, row] : v.all<Movie>())
                out.push_back(row.value);
            return out;
        });
    }
};

} // namespace

TEST(Search, MatchesBruteForceOracle)
{
    Seeded w;
    ASSERT_EQ(w.counts.movies, 100);
    ASSERT_GT(w.counts.bookings, 0);
    ASSERT_GT(w.counts.reviews, 0);
    const auto movies = w.movies();
    std::mt19937_64 rng(99);
    int non_empty = 0;
    for (int i = 0; i < 500; ++i) {
        const auto q = oracle::random_query(rng, movies);
        const auto got = ids_of(search_movies(w.s, q));
        EXPECT_EQ(got, oracle::search(w.s, q)) << "query " << i << " text=" << q.text.value_or("<none>")
                                                << " sort=" << to_string(q.sort);
        non_empty += got.empty() ? 0 : 1;
    }
    // The generator should not make the comparison vacuous.
    EXPECT_GT(non_empty, 150);
}

TEST(Search, Examples)
{
    store::Store s;
    const Id god = add_movie(s, "Godfather");
    const Id heat = add_movie(s, "Heat", {"crime"});
    SearchQuery q;
    q.text = "god";
    EXPECT_EQ(ids_of(search_movies(s, q)), std::vector<Id>{god});
    q.text = "";
    EXPECT_EQ(ids_of(search_movies(s, q)), (std::vector<Id>{god, heat}));
    EXPECT_EQ(ids_of(search_movies(s, SearchQuery{})), (std::vector<Id>{god, heat}));
    q.genre = "CRIME";
    EXPECT_EQ(ids_of(search_movies(s, q)), std::vector<Id>{heat});

    SearchQuery bad;
    bad.date_from = Date::parse("2026-02-01");
    bad.date_to = Date::parse("2026-01-01");
    EXPECT_EQ(code_of([&] { search_movies(s, bad); }), ErrorCode::InvalidQuery);
    SearchQuery rating;
    rating.min_rating = 5.5;
    EXPECT_EQ(code_of([&] { search_movies(s, rating); }), ErrorCode::InvalidQuery);
    EXPECT_EQ(code_of([] { sort_key_from_string("loudness"); }), ErrorCode::InvalidQuery);
    for (auto k : {SortKey::relevance, SortKey::popularity, SortKey::release_date, SortKey::rating})
        EXPECT_EQ(sort_key_from_string(to_string(k)), k);
}

TEST(Search, RelevanceTiers)
{
    store::Store s;
    Movie a;
    a.title = "Quiet Place";
    a.description = "A tale of rivers.";
    Movie b;
    b.title = "Rivers";
    Movie c;
    c.title = "Other";
    c.cast = {"Amy Rivers"};
    const Id ia = fixture::add_movie(s, a);
    const Id ib = fixture::add_movie(s, b);
    const Id ic = fixture::add_movie(s, c);
    SearchQuery q;
    q.text = "RIVERS";
    EXPECT_EQ(ids_of(search_movies(s, q)), (std::vector<Id>{ib, ic, ia}));
}

TEST(Search, RepeatedCallsAreIdentical)
{
    Seeded w;
    for (auto k : {SortKey::relevance, SortKey::popularity, SortKey::release_date, SortKey::rating}) {
        SearchQuery q;
        q.sort = k;
        EXPECT_EQ(ids_of(search_movies(w.s, q)), ids_of(search_movies(w.s, q)));
    }
}

TEST(Venues, SearchByNameOrAddress)
{
    store::Store s;
    const Id plaza = add_venue(s, 2, 2, "Plaza");
    const Id metro = add_venue(s, 2, 2, "Metro Screens");
    EXPECT_EQ(search_venues(s, "main road").size(), 2u);
    ASSERT_EQ(search_venues(s, "metro").size(), 1u);
    EXPECT_EQ(search_venues(s, "metro")[0].venue_id, metro);
    EXPECT_EQ(search_venues(s, "")[0].venue_id, plaza);
}

TEST(ListShows, ByVenueAndMovie)
{
    store::Store s;
    booking::BookingEngine engine(s, Policy{});
    const Id user = add_user(s, "alice");
    const Id movie = add_movie(s, "Godfather");
    const Id venue = add_venue(s, 5, 10);
    const Date day = Date::of(kEpoch).plus_days(3);
    const auto late = engine.create_show(movie, venue, day.start_millis() + 21 * kMillisPerHour, Money{100, "INR"}, kEpoch);
    const auto early = engine.create_show(movie, venue, day.start_millis() + 10 * kMillisPerHour, Money{100, "INR"}, kEpoch);
    engine.create_show(movie, venue, day.plus_days(1).start_millis(), Money{100, "INR"}, kEpoch);
    engine.book_seats(user, early.show_id, seats({"A1", "A2"}), 0, kEpoch);

    const auto at_venue = list_shows_at_venue(s, venue, day);
    ASSERT_EQ(at_venue.size(), 2u);
    EXPECT_EQ(at_venue[0].show.show_id, early.show_id);
    EXPECT_EQ(at_venue[0].seats_remaining, 48);
    EXPECT_EQ(at_venue[0].capacity, 50);
    EXPECT_EQ(at_venue[1].show.show_id, late.show_id);
    EXPECT_EQ(at_venue[1].seats_remaining, 50);
    EXPECT_EQ(list_shows_for_movie(s, movie, day).size(), 2u);
    EXPECT_TRUE(list_shows_at_venue(s, venue, day.plus_days(5)).empty());
    EXPECT_EQ(code_of([&] { list_shows_at_venue(s, 99, day); }), ErrorCode::UnknownVenue);
    EXPECT_EQ(code_of([&] { list_shows_for_movie(s, 99, day); }), ErrorCode::UnknownMovie);
}

TEST(SeatGridTest, TracksSoldSeats)
{
    store::Store s;
    booking::BookingEngine engine(s, Policy{});
    const Id user = add_user(s, "alice");
    const Id movie = add_movie(s, "Godfather");
    const Id venue = add_venue(s, 2, 3);
    const auto show = engine.create_show(movie, venue, kEpoch + kMillisPerDay, Money{100, "INR"}, kEpoch);

    auto g = seat_availability(s, show.show_id);
    EXPECT_EQ(g.rows, 2);
    EXPECT_EQ(g.cols, 3);
    EXPECT_EQ(g.seats_remaining, 6);
    EXPECT_FALSE(g.houseful());

    engine.book_seats(user, show.show_id, seats({"A1"}), 0, kEpoch);
    g = seat_availability(s, show.show_id);
    int sold = 0;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 3; ++c)
            sold += g.sold[r][c] ? 1 : 0;
    EXPECT_EQ(sold, 1);
    EXPECT_TRUE(g.sold[0][0]);

    engine.book_seats(user, show.show_id, seats({"A2", "A3", "B1", "B2", "B3"}), 0, kEpoch);
    g = seat_availability(s, show.show_id);
    EXPECT_TRUE(g.houseful());
    for (const auto& row : g.sold)
        for (bool cell : row)
            EXPECT_TRUE(cell);
    EXPECT_EQ(code_of([&] { seat_availability(s, 99); }), ErrorCode::UnknownShow);
}

TEST(Collections, RuleBasedLists)
{
    store::Store s;
    std::vector<Id> users;
    for (int i = 0; i < 3; ++i)
        users.push_back(add_user(s, "u" + std::to_string(i)));
    const Date today = Date::of(kEpoch);
    const Id a = add_movie(s, "A", {"drama"}, today.plus_days(-400).to_string());
    const Id b = add_movie(s, "B", {"drama"}, today.plus_days(-30).to_string());
    const Id c = add_movie(s, "C", {"drama"}, today.to_string());
    const Id d = add_movie(s, "D", {"drama"}, today.plus_days(-31).to_string());
    add_movie(s, "E", {"drama"}, today.plus_days(1).to_string());
    // a: mean 4.0 over 3, compound mean 0.3; b: mean 5 over 3, compound 0.6; c: only 2 ratings.
    for (int i = 0; i < 3; ++i) {
        add_review(s, users[i], a, i == 0 ? 5 : (i == 1 ? 4 : 3), 0.3);
        add_review(s, users[i], b, 5, 0.6);
        add_review(s, users[i], d, 4, 0.2);
    }
    add_review(s, users[0], c, 5, 0.9);
    add_review(s, users[1], c, 5, 0.9);

    const auto cols = curated_collections(s, kEpoch + 5 * kMillisPerHour);
    ASSERT_EQ(cols.size(), 3u);
    EXPECT_EQ(cols[0].name, "Top Rated");
    EXPECT_EQ(cols[0].movie_ids, (std::vector<Id>{b, a, d}));
    EXPECT_EQ(cols[1].name, "Audience Favourites");
    EXPECT_EQ(cols[1].movie_ids, (std::vector<Id>{b, a}));
    EXPECT_EQ(cols[2].name, "New Releases");
    EXPECT_EQ(cols[2].movie_ids, (std::vector<Id>{c, b}));
}

TEST(Recommend, WorkedExampleScore)
{
    EXPECT_NEAR(combine(RecommendationWeights{}, 1.0, 4.0 / 5.0, (0.44 + 1.0) / 2.0), 0.856, 1e-9);

    store::Store s;
    const Id me = add_user(s, "me");
    const Id x = add_user(s, "x");
    const Id y = add_user(s, "y");
    const Id seen = add_movie(s, "Seen", {"drama"});
    const Id target = add_movie(s, "Target", {"drama"});
    add_review(s, me, seen, 5, 0.1);
    add_review(s, x, target, 5, 0.40);
    add_review(s, y, target, 3, 0.48);

    const auto recs = recommend(s, me, 5);
    ASSERT_EQ(recs.size(), 2u);
    const auto& r = recs[0].movie_id == target ? recs[0] : recs[1];
    EXPECT_EQ(r.movie_id, target);
    EXPECT_DOUBLE_EQ(r.genre_affinity, 1.0);
    EXPECT_NEAR(r.norm_rating, 0.8, 1e-12);
    EXPECT_NEAR(r.sentiment_index, 0.72, 1e-12);
    EXPECT_NEAR(r.score, 0.856, 1e-9);
}

TEST(Recommend, OrderInvariantUnderWeightScaling)
{
    Seeded w;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> weight(0.01, 1.0);
    std::uniform_real_distribution<double> scale(0.001, 1000.0);
    const auto n_users = w.s.read([](const store::View& v) { return v.all<UserAccount>().size(); });
    for (int trial = 0; trial < 60; ++trial) {
        const Id user = 1 + static_cast<Id>(rng() % n_users);
        RecommendationWeights a{weight(rng), weight(rng), weight(rng)};
        const double c = scale(rng);
        RecommendationWeights b{a.genre_affinity * c, a.norm_rating * c, a.sentiment_index * c};
        EXPECT_EQ(ids_of(recommend(w.s, user, 100, a)), ids_of(recommend(w.s, user, 100, b)))
            << "user " << user << " scale " << c;
    }
}

TEST(Recommend, SortedByScoreWithIdTieBreak)
{
    Seeded w;
    for (Id user = 1; user <= 10; ++user) {
        const auto recs = recommend(w.s, user, 1000);
        for (std::size_t i = 1; i < recs.size(); ++i) {
            EXPECT_GE(recs[i - 1].score + 1e-12, recs[i].score);
            if (std::abs(recs[i - 1].score - recs[i].score) < 1e-13)
                EXPECT_LT(recs[i - 1].movie_id, recs[i].movie_id);
        }
    }
}

TEST(Recommend, ExcludesBookedMoviesAndHandlesColdStart)
{
    store::Store s;
    booking::BookingEngine engine(s, Policy{});
    const Id me = add_user(s, "me");
    const Id other = add_user(s, "other");
    const Id newbie = add_user(s, "newbie");
    const Id venue = add_venue(s, 5, 10);
    const Id m1 = add_movie(s, "One");
    const Id m2 = add_movie(s, "Two");
    const Id m3 = add_movie(s, "Three");
    const auto sh2 = engine.create_show(m2, venue, kEpoch + kMillisPerDay, Money{100, "INR"}, kEpoch);
    const auto sh3 = engine.create_show(m3, venue, kEpoch + kMillisPerDay + 1, Money{100, "INR"}, kEpoch);
    engine.book_seats(other, sh3.show_id, seats({"A1"}), 0, kEpoch);
    engine.book_seats(other, sh3.show_id, seats({"A2"}), 0, kEpoch);
    engine.book_seats(other, sh2.show_id, seats({"A3"}), 0, kEpoch);
    add_review(s, other, m1, 5, 0.5);

    // Cold start: popularity, then mean rating, then id.
    EXPECT_EQ(ids_of(recommend(s, newbie, 10)), (std::vector<Id>{m3, m2, m1}));
    EXPECT_EQ(ids_of(recommend(s, newbie, 2)), (std::vector<Id>{m3, m2}));

    const auto mine = engine.book_seats(me, sh3.show_id, seats({"B1"}), 0, kEpoch);
    auto got = ids_of(recommend(s, me, 10));
    EXPECT_EQ(std::count(got.begin(), got.end(), m3), 0);
    EXPECT_EQ(got.size(), 2u);
    engine.cancel_booking(me, mine.booking_id, kEpoch);
    got = ids_of(recommend(s, me, 10));
    EXPECT_EQ(got.size(), 3u);

    EXPECT_EQ(code_of([&] { recommend(s, 99, 3); }), ErrorCode::UnknownUser);
    EXPECT_EQ(code_of([&] { recommend(s, me, 0); }), ErrorCode::BadRequest);
}
