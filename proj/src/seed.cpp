#include "stageseat/seed.hpp"

#include "stageseat/error.hpp"

#include <array>
#include <set>
#include <string>

namespace stageseat::seed {

namespace {

constexpr std::array kAdjectives{"Silent", "Crimson", "Last",   "Hidden", "Broken", "Golden", "Midnight",
                                 "Electric", "Distant", "Wild",  "Frozen", "Secret", "Burning", "Paper"};
constexpr std::array kNouns{"Monsoon", "Horizon", "Kingdom", "Letter", "Signal", "Harbour", "Orbit",
                            "Garden",  "Circus",  "Echo",    "Voyage", "Empire", "Lantern", "Tide"};
constexpr std::array kGenres{"drama", "comedy", "action", "thriller", "romance", "horror", "sci-fi", "animation"};
constexpr std::array kLanguages{"Hindi", "English", "Tamil", "Telugu", "Malayalam", "Bengali"};
constexpr std::array kFirstNames{"Asha", "Ravi", "Meera", "Karan", "Isha", "Vikram", "Nila", "Arjun", "Tara", "Dev"};
constexpr std::array kLastNames{"Rao", "Sharma", "Iyer", "Kapoor", "Menon", "Das", "Khan", "Bose", "Nair", "Gill"};
constexpr std::array kPlaces{"Central", "Riverside", "Lakeview", "Old Town", "Harbour", "Hillside", "Metro", "Park"};
constexpr std::array kAmenities{"parking", "food court", "recliners", "dolby atmos", "3d"};
constexpr std::array kPhrases{"a great film",      "not good at all",    "very boring in places",
                              "an absolute masterpiece", "terrible pacing", "somewhat mediocre",
                              "i love the music",  "hardly excellent",   "the plot is plain",
                              "extremely good acting", "bad ending",     "never boring"};
constexpr std::array kShowHours{10, 14, 18, 21};

template <class A>
const char* pick(Rng& rng, const A& items)
{
    return items[static_cast<std::size_t>(rng.between(0, static_cast<std::int64_t>(items.size()) - 1))];
}

std::string person(Rng& rng)
{
    return std::string(pick(rng, kFirstNames)) + " " + pick(rng, kLastNames);
}

} // namespace

std::uint64_t Rng::next()
{
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::int64_t Rng::between(std::int64_t lo, std::int64_t hi)
{
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(next() % span);
}

double Rng::unit()
{
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

SeedCounts generate(store::Store& store, booking::BookingEngine& engine, const sentiment::Lexicon& lexicon,
                    const SeedOptions& options, const std::string& password_digest)
{
    if (options.movies < 1 || options.venues < 1 || options.days < 0 || options.shows_per_venue_day < 0 ||
        options.shows_per_venue_day > static_cast<int>(kShowHours.size()) || options.users < 0 ||
        options.bookings < 0 || options.reviews < 0)
        throw Error(ErrorCode::BadRequest, "seed options out of range");
    if ((options.bookings > 0 || options.reviews > 0) && options.users == 0)
        throw Error(ErrorCode::BadRequest, "bookings and reviews need at least one user");

    Rng rng(options.seed);
    SeedCounts counts;
    const Timestamp base = options.base_date.start_millis();

    std::vector<Id> movie_ids;
    std::set<std::string> titles;
    for (int i = 0; i < options.movies; ++i) {
        Movie m;
        std::string title = std::string("The ") + pick(rng, kAdjectives) + " " + pick(rng, kNouns);
        for (int n = 2; titles.contains(title); ++n)
            title = std::string("The ") + pick(rng, kAdjectives) + " " + pick(rng, kNouns) + " " + std::to_string(n);
        titles.insert(title);
        m.title = title;
        const int n_genres = static_cast<int>(rng.between(1, 2));
        for (int g = 0; g < n_genres; ++g)
            m.genres.insert(pick(rng, kGenres));
        m.director = person(rng);
        const int n_cast = static_cast<int>(rng.between(2, 4));
        for (int c = 0; c < n_cast; ++c)
            m.cast.push_back(person(rng));
        m.language = pick(rng, kLanguages);
        m.description = "A " + *m.genres.begin() + " about " + to_lower(pick(rng, kNouns)) + "s and " +
                        to_lower(pick(rng, kNouns)) + "s, starring " + m.cast.front() + ".";
        m.release_date = options.base_date.plus_days(static_cast<int>(rng.between(-400, 10)));
        movie_ids.push_back(store.transact({store::Insert{m, std::nullopt}}).ids.at(0));
        ++counts.movies;
    }

    std::vector<Id> venue_ids;
    for (int i = 0; i < options.venues; ++i) {
        Venue v;
        v.name = std::string(pick(rng, kPlaces)) + " Cinema " + std::to_string(i + 1);
        v.address = std::to_string(rng.between(1, 300)) + " " + pick(rng, kPlaces) + " Road";
        v.amenities.push_back(pick(rng, kAmenities));
        if (rng.unit() < 0.5)
            v.accessibility.push_back("wheelchair");
        v.rows = static_cast<int>(rng.between(5, 12));
        v.cols = static_cast<int>(rng.between(8, 20));
        venue_ids.push_back(store.transact({store::Insert{v, std::nullopt}}).ids.at(0));
        ++counts.venues;
    }

    std::vector<Id> show_ids;
    const Timestamp created = base - 30 * kMillisPerDay;
    for (Id venue : venue_ids) {
        for (int d = 0; d < options.days; ++d) {
            for (int s = 0; s < options.shows_per_venue_day; ++s) {
                const Timestamp starts = options.base_date.plus_days(d).start_millis() + kShowHours[s] * kMillisPerHour;
                const Id movie = movie_ids[static_cast<std::size_t>(rng.between(0, options.movies - 1))];
                const Money price{rng.between(15, 40) * 1000, engine.policy().currency};
                show_ids.push_back(engine.create_show(movie, venue, starts, price, created).show_id);
                ++counts.shows;
            }
        }
    }

    std::vector<Id> user_ids;
    for (int i = 0; i < options.users; ++i) {
        UserAccount u;
        u.username = "user" + std::to_string(i + 1);
        u.email = u.username + "@example.com";
        u.password_digest = password_digest;
        u.created_at = created;
        user_ids.push_back(store.transact({store::Insert{u, std::nullopt}}).ids.at(0));
        ++counts.users;
    }

    for (int i = 0; i < options.reviews && !user_ids.empty(); ++i) {
        const Id user = user_ids[static_cast<std::size_t>(rng.between(0, options.users - 1))];
        const Id movie = movie_ids[static_cast<std::size_t>(rng.between(0, options.movies - 1))];
        std::string text = pick(rng, kPhrases);
        if (rng.unit() < 0.5)
            text += ", " + std::string(pick(rng, kPhrases));
        const int rating = static_cast<int>(rng.between(1, 5));
        const Timestamp at = created + rng.between(0, 20) * kMillisPerDay;
        try {
            engine.post_review(user, movie, rating, text, sentiment::score_text(lexicon, text), at);
            ++counts.reviews;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::DuplicateReview)
                throw;
        }
    }

    for (int i = 0; i < options.bookings && !show_ids.empty(); ++i) {
        const Id user = user_ids[static_cast<std::size_t>(rng.between(0, options.users - 1))];
        const Id show_id = show_ids[static_cast<std::size_t>(rng.between(0, static_cast<int>(show_ids.size()) - 1))];
        const auto [venue, show] = store.read([&](const store::View& v) {
            const Show& s = *v.find<Show>(show_id);
            return std::pair{*v.find<Venue>(s.venue_id), s};
        });
        SeatSet seats;
        const int want = static_cast<int>(rng.between(1, 3));
        for (int k = 0; k < want; ++k)
            seats.insert(SeatId{static_cast<int>(rng.between(0, venue.rows - 1)),
                                static_cast<int>(rng.between(0, venue.cols - 1))});
        const auto balance = engine.coin_balance(user);
        const auto coins = balance > 0 && rng.unit() < 0.3 ? rng.between(1, balance) : 0;
        const Timestamp at = created + rng.between(1, 28) * kMillisPerDay + rng.between(0, 23) * kMillisPerHour;
        try {
            auto b = engine.book_seats(user, show_id, seats, coins, at);
            ++counts.bookings;
            if (rng.unit() < 0.1)
                engine.cancel_booking(user, b.booking_id, at + kMillisPerHour);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::SeatTaken && e.code() != ErrorCode::Houseful)
                throw;
        }
    }
    return counts;
}

} // namespace stageseat::seed
