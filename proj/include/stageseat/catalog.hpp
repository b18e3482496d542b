#pragma once

#include "stageseat/domain.hpp"
#include "stageseat/sentiment.hpp"
#include "stageseat/store.hpp"

#include <optional>
#include <string>
#include <vector>

namespace stageseat::catalog {

enum class SortKey { relevance, popularity, release_date, rating };

std::string_view to_string(SortKey key);
/// Throws Error(InvalidQuery) for unknown names.
SortKey sort_key_from_string(std::string_view text);

struct SearchQuery {
    std::optional<std::string> text;
    std::optional<std::string> genre;
    std::optional<std::string> language;
    std::optional<Date> date_from;
    std::optional<Date> date_to;
    std::optional<double> min_rating;
    SortKey sort = SortKey::relevance;
};

/// Throws Error(InvalidQuery) when date_from > date_to or min_rating is
/// outside [1, 5].
void validate(const SearchQuery& q);

/// Derived per-movie figures shared by search, collections and recommend.
struct MovieStats {
    int n_ratings = 0;
    double mean_rating = 0.0; // 0 when unrated
    int popularity = 0;       // active bookings across the movie's shows
    sentiment::AggregateSentiment sentiment;
};

MovieStats movie_stats(const store::View& view, Id movie_id);

/// Relevance tier of a movie for a lowercased needle: 3 title, 2 director or
/// cast, 1 description, 0 no match. An empty needle matches everything at 0.
int relevance(const Movie& movie, const std::string& needle);

/// Case-insensitive substring search plus filters. Sorted descending by the
/// chosen key (newest first for release_date), ties by ascending movie_id.
std::vector<Movie> search_movies(const store::Store& store, const SearchQuery& q);

/// Venues whose name or address contains q (case-insensitive), by id.
std::vector<Venue> search_venues(const store::Store& store, const std::string& q);

struct ShowListing {
    Show show;
    int capacity = 0;
    int seats_remaining = 0;
};

/// Shows starting on `date` (UTC), ordered by start time then id.
std::vector<ShowListing> list_shows_at_venue(const store::Store& store, Id venue_id, Date date);
std::vector<ShowListing> list_shows_for_movie(const store::Store& store, Id movie_id, Date date);

struct SeatGrid {
    Id show_id = 0;
    int rows = 0;
    int cols = 0;
    std::vector<std::vector<bool>> sold; // [row][col]
    int seats_remaining = 0;

    [[nodiscard]] bool houseful() const { return seats_remaining == 0; }
};

SeatGrid seat_availability(const store::Store& store, Id show_id);

struct Collection {
    std::string name;
    std::vector<Id> movie_ids;
};

inline constexpr int kCollectionMinRatings = 3;
inline constexpr double kTopRatedMinMean = 4.0;
inline constexpr double kFavouritesMinCompound = 0.3;
inline constexpr int kNewReleaseWindowDays = 30;

/// "Top Rated", "Audience Favourites" and "New Releases", in that order.
std::vector<Collection> curated_collections(const store::Store& store, Timestamp now);

struct RecommendationWeights {
    double genre_affinity = 0.4;
    double norm_rating = 0.3;
    double sentiment_index = 0.3;
};

struct RecommendationScore {
    Id movie_id = 0;
    double score = 0.0;
    double genre_affinity = 0.0;
    double norm_rating = 0.0;
    double sentiment_index = 0.0;
};

/// Weighted sum of the three components.
double combine(const RecommendationWeights& w, double genre_affinity, double norm_rating, double sentiment_index);

/// Top-k unbooked movies for the user. Users without ratings, reviews or
/// active bookings get popularity order (then mean rating, then id).
std::vector<RecommendationScore> recommend(const store::Store& store, Id user_id, int k,
                                           const RecommendationWeights& weights = {});

} // namespace stageseat::catalog
