#include "stageseat/catalog.hpp"

#include "stageseat/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

namespace stageseat::catalog {

namespace {

bool contains_ci(const std::string& haystack, const std::string& lowered_needle)
{
    return to_lower(haystack).find(lowered_needle) != std::string::npos;
}

bool equals_ci(const std::string& a, const std::string& b)
{
    return to_lower(a) == to_lower(b);
}

std::vector<ShowListing> listings(const store::View& v, const std::set<Id>& show_ids, Date date)
{
    std::vector<ShowListing> out;
    for (Id sid : show_ids) {
        const Show& s = *v.find<Show>(sid);
        if (Date::of(s.starts_at) != date)
            continue;
        const int capacity = v.find<Venue>(s.venue_id)->capacity();
        out.push_back(ShowListing{s, capacity, capacity - static_cast<int>(s.sold.size())});
    }
    std::sort(out.begin(), out.end(), [](const ShowListing& a, const ShowListing& b) {
        return std::tie(a.show.starts_at, a.show.show_id) < std::tie(b.show.starts_at, b.show.show_id);
    });
    return out;
}

} // namespace

std::string_view to_string(SortKey key)
{
    switch (key) {
    case SortKey::relevance: return "relevance";
    case SortKey::popularity: return "popularity";
    case SortKey::release_date: return "release_date";
    case SortKey::rating: return "rating";
    }
    return "relevance";
}

SortKey sort_key_from_string(std::string_view text)
{
    for (auto k : {SortKey::relevance, SortKey::popularity, SortKey::release_date, SortKey::rating}) {
        if (to_string(k) == text)
            return k;
    }
    throw Error(ErrorCode::InvalidQuery, "unknown sort '" + std::string(text) + "'");
}

void validate(const SearchQuery& q)
{
    if (q.date_from && q.date_to && *q.date_from > *q.date_to)
        throw Error(ErrorCode::InvalidQuery, "date_from is after date_to");
    if (q.min_rating && !(*q.min_rating >= 1.0 && *q.min_rating <= 5.0))
        throw Error(ErrorCode::InvalidQuery, "min_rating must be within [1, 5]");
}

MovieStats movie_stats(const store::View& view, Id movie_id)
{
    MovieStats stats;
    std::vector<SentimentScore> scores;
    long rating_total = 0;
    for (Id rid : view.reviews_of_movie(movie_id)) {
        const Review& r = *view.find<Review>(rid);
        rating_total += r.rating;
        ++stats.n_ratings;
        scores.push_back(r.sentiment);
    }
    if (stats.n_ratings > 0)
        stats.mean_rating = static_cast<double>(rating_total) / stats.n_ratings;
    stats.sentiment = sentiment::aggregate_reviews(scores);
    for (Id sid : view.shows_of_movie(movie_id)) {
        for (Id bid : view.bookings_of_show(sid)) {
            if (view.find<Booking>(bid)->status == BookingStatus::active)
                ++stats.popularity;
        }
    }
    return stats;
}

int relevance(const Movie& movie, const std::string& needle)
{
    if (needle.empty())
        return 0;
    if (contains_ci(movie.title, needle))
        return 3;
    if (contains_ci(movie.director, needle) ||
        std::any_of(movie.cast.begin(), movie.cast.end(), [&](const std::string& c) { return contains_ci(c, needle); }))
        return 2;
    if (contains_ci(movie.description, needle))
        return 1;
    return 0;
}

std::vector<Movie> search_movies(const store::Store& store, const SearchQuery& q)
{
    validate(q);
    const std::string needle = q.text ? to_lower(*q.text) : std::string{};

    struct Hit {
        const Movie* movie;
        int relevance;
        MovieStats stats;
    };

    return store.read([&](const store::View& v) {
        std::vector<Hit> hits;
        for (const auto& [id, row] : v.all<Movie>()) {
            const Movie& m = row.value;
            const int rel = relevance(m, needle);
            if (!needle.empty() && rel == 0)
                continue;
            if (q.genre && std::none_of(m.genres.begin(), m.genres.end(),
                                        [&](const std::string& g) { return equals_ci(g, *q.genre); }))
                continue;
            if (q.language && !equals_ci(m.language, *q.language))
                continue;
            if (q.date_from && m.release_date < *q.date_from)
                continue;
            if (q.date_to && m.release_date > *q.date_to)
                continue;
            MovieStats stats = movie_stats(v, id);
            if (q.min_rating && (stats.n_ratings == 0 || stats.mean_rating < *q.min_rating))
                continue;
            hits.push_back(Hit{&m, rel, stats});
        }

        auto key_greater = [&](const Hit& a, const Hit& b) -> int {
            switch (q.sort) {
            case SortKey::relevance:
                return a.relevance == b.relevance ? 0 : (a.relevance > b.relevance ? 1 : -1);
            case SortKey::popularity:
                return a.stats.popularity == b.stats.popularity ? 0 : (a.stats.popularity > b.stats.popularity ? 1 : -1);
            case SortKey::release_date:
                return a.movie->release_date == b.movie->release_date
                           ? 0
                           : (a.movie->release_date > b.movie->release_date ? 1 : -1);
            case SortKey::rating:
                return a.stats.mean_rating == b.stats.mean_rating ? 0
                                                                  : (a.stats.mean_rating > b.stats.mean_rating ? 1 : -1);
            }
            return 0;
        };
        std::sort(hits.begin(), hits.end(), [&](const Hit& a, const Hit& b) {
            const int c = key_greater(a, b);
            return c != 0 ? c > 0 : a.movie->movie_id < b.movie->movie_id;
        });

        std::vector<Movie> out;
        out.reserve(hits.size());
        for (const auto& h : hits)
            out.push_back(*h.movie);
        return out;
    });
}

std::vector<Venue> search_venues(const store::Store& store, const std::string& q)
{
    const std::string needle = to_lower(q);
    return store.read([&](const store::View& v) {
        std::vector<Venue> out;
        for (const auto& [id, row] : v.all<Venue>()) {
            if (needle.empty() || contains_ci(row.value.name, needle) || contains_ci(row.value.address, needle))
                out.push_back(row.value);
        }
        return out;
    });
}

std::vector<ShowListing> list_shows_at_venue(const store::Store& store, Id venue_id, Date date)
{
    return store.read([&](const store::View& v) {
        if (!v.find<Venue>(venue_id))
            throw Error(ErrorCode::UnknownVenue, "venue " + std::to_string(venue_id) + " does not exist");
        return listings(v, v.shows_of_venue(venue_id), date);
    });
}

std::vector<ShowListing> list_shows_for_movie(const store::Store& store, Id movie_id, Date date)
{
    return store.read([&](const store::View& v) {
        if (!v.find<Movie>(movie_id))
            throw Error(ErrorCode::UnknownMovie, "movie " + std::to_string(movie_id) + " does not exist");
        return listings(v, v.shows_of_movie(movie_id), date);
    });
}

SeatGrid seat_availability(const store::Store& store, Id show_id)
{
    return store.read([&](const store::View& v) {
        const Show* show = v.find<Show>(show_id);
        if (!show)
            throw Error(ErrorCode::UnknownShow, "show " + std::to_string(show_id) + " does not exist");
        const Venue& venue = *v.find<Venue>(show->venue_id);
        SeatGrid grid;
        grid.show_id = show_id;
        grid.rows = venue.rows;
        grid.cols = venue.cols;
        grid.sold.assign(venue.rows, std::vector<bool>(venue.cols, false));
        for (const auto& s : show->sold)
            grid.sold[s.row][s.col] = true;
        grid.seats_remaining = venue.capacity() - static_cast<int>(show->sold.size());
        return grid;
    });
}

std::vector<Collection> curated_collections(const store::Store& store, Timestamp now)
{
    const Date today = Date::of(now);
    const Date window_start = today.plus_days(-kNewReleaseWindowDays);

    return store.read([&](const store::View& v) {
        std::vector<std::pair<double, Id>> top;
        std::vector<std::pair<double, Id>> favourites;
        std::vector<std::pair<Date, Id>> fresh;
        for (const auto& [id, row] : v.all<Movie>()) {
            const MovieStats s = movie_stats(v, id);
            if (s.n_ratings >= kCollectionMinRatings && s.mean_rating >= kTopRatedMinMean)
                top.emplace_back(s.mean_rating, id);
            if (s.sentiment.n_reviews >= kCollectionMinRatings && s.sentiment.mean_compound >= kFavouritesMinCompound)
                favourites.emplace_back(s.sentiment.mean_compound, id);
            if (row.value.release_date >= window_start && row.value.release_date <= today)
                fresh.emplace_back(row.value.release_date, id);
        }
        auto by_key_desc = [](const auto& a, const auto& b) {
            return a.first != b.first ? a.first > b.first : a.second < b.second;
        };
        std::sort(top.begin(), top.end(), by_key_desc);
        std::sort(favourites.begin(), favourites.end(), by_key_desc);
        std::sort(fresh.begin(), fresh.end(), by_key_desc);

        auto ids = [](const auto& ranked) {
            std::vector<Id> out;
            for (const auto& [key, id] : ranked)
                out.push_back(id);
            return out;
        };
        return std::vector<Collection>{{"Top Rated", ids(top)},
                                       {"Audience Favourites", ids(favourites)},
                                       {"New Releases", ids(fresh)}};
    });
}

double combine(const RecommendationWeights& w, double genre_affinity, double norm_rating, double sentiment_index)
{
    return w.genre_affinity * genre_affinity + w.norm_rating * norm_rating + w.sentiment_index * sentiment_index;
}

std::vector<RecommendationScore> recommend(const store::Store& store, Id user_id, int k,
                                           const RecommendationWeights& weights)
{
    if (k < 1)
        throw Error(ErrorCode::BadRequest, "k must be at least 1");

    return store.read([&](const store::View& v) {
        if (!v.find<UserAccount>(user_id))
            throw Error(ErrorCode::UnknownUser, "user " + std::to_string(user_id) + " does not exist");

        std::set<Id> booked;
        for (Id bid : v.bookings_of_user(user_id)) {
            const Booking& b = *v.find<Booking>(bid);
            if (b.status == BookingStatus::active)
                booked.insert(v.find<Show>(b.show_id)->movie_id);
        }
        std::set<std::string> liked;
        auto like = [&](Id movie_id) {
            const Movie& m = *v.find<Movie>(movie_id);
            liked.insert(m.genres.begin(), m.genres.end());
        };
        for (Id mid : booked)
            like(mid);
        const auto& reviews = v.reviews_of_user(user_id);
        for (Id rid : reviews) {
            const Review& r = *v.find<Review>(rid);
            if (r.rating >= 4 || r.sentiment.label == SentimentLabel::positive)
                like(r.movie_id);
        }
        const bool cold_start = booked.empty() && reviews.empty();

        struct Candidate {
            RecommendationScore score;
            int popularity;
            double mean_rating;
        };
        std::vector<Candidate> candidates;
        for (const auto& [id, row] : v.all<Movie>()) {
            if (booked.contains(id))
                continue;
            const Movie& m = row.value;
            const MovieStats s = movie_stats(v, id);
            RecommendationScore rs;
            rs.movie_id = id;
            const auto shared = std::count_if(m.genres.begin(), m.genres.end(),
                                              [&](const std::string& g) { return liked.contains(g); });
            rs.genre_affinity = static_cast<double>(shared) / std::max<std::size_t>(1, m.genres.size());
            rs.norm_rating = s.n_ratings > 0 ? s.mean_rating / 5.0 : 0.0;
            rs.sentiment_index = s.sentiment.n_reviews > 0 ? (s.sentiment.mean_compound + 1.0) / 2.0 : 0.5;
            rs.score = combine(weights, rs.genre_affinity, rs.norm_rating, rs.sentiment_index);
            candidates.push_back(Candidate{rs, s.popularity, s.mean_rating});
        }

        if (cold_start) {
            std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
                if (a.popularity != b.popularity)
                    return a.popularity > b.popularity;
                if (a.mean_rating != b.mean_rating)
                    return a.mean_rating > b.mean_rating;
                return a.score.movie_id < b.score.movie_id;
            });
        } else {
            // Rank on the weight-normalized score rounded to 1e-12 so that
            // scaling all weights cannot reorder ties through rounding noise.
            const double weight_sum = weights.genre_affinity + weights.norm_rating + weights.sentiment_index;
            auto rank_key = [&](const Candidate& c) {
                return weight_sum > 0 ? std::llround(c.score.score / weight_sum * 1e12) : 0LL;
            };
            std::sort(candidates.begin(), candidates.end(), [&](const Candidate& a, const Candidate& b) {
                const auto ka = rank_key(a);
                const auto kb = rank_key(b);
                if (ka != kb)
                    return ka > kb;
                return a.score.movie_id < b.score.movie_id;
            });
        }

        std::vector<RecommendationScore> out;
        for (std::size_t i = 0; i < candidates.size() && static_cast<int>(i) < k; ++i)
            out.push_back(candidates[i].score);
        return out;
    });
}

} // namespace stageseat::catalog
