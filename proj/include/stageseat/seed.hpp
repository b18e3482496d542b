#pragma once

// Deterministic demo/test dataset. The same options always produce the same
// records (and ids, when loaded into an empty store).

#include "stageseat/booking.hpp"
#include "stageseat/sentiment.hpp"
#include "stageseat/store.hpp"

#include <cstdint>

namespace stageseat::seed {

struct SeedOptions {
    int movies = 20;
    int venues = 5;
    int users = 0;
    int shows_per_venue_day = 2;
    int days = 3;
    int bookings = 0;
    int reviews = 0;
    std::uint64_t seed = 42;
    Date base_date = Date::parse("2026-01-01");
};

struct SeedCounts {
    int movies = 0;
    int venues = 0;
    int shows = 0;
    int users = 0;
    int bookings = 0;
    int reviews = 0;
};

/// Small splitmix64 generator; used instead of <random> distributions so the
/// sequence is identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();
    /// Uniform in [lo, hi].
    std::int64_t between(std::int64_t lo, std::int64_t hi);
    double unit();

private:
    std::uint64_t state_;
};

/// Fills `store` (which should be empty). Users get password digests computed
/// with `password_digest` as given, so callers can pass a precomputed one.
/// Bookings are made before the show dates and reviews are posted through the
/// booking engine so all coin rules hold.
SeedCounts generate(store::Store& store, booking::BookingEngine& engine, const sentiment::Lexicon& lexicon,
                    const SeedOptions& options, const std::string& password_digest);

} // namespace stageseat::seed
