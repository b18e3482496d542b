#pragma once

#include "stageseat/booking.hpp"
#include "stageseat/domain.hpp"
#include "stageseat/sentiment.hpp"
#include "stageseat/store.hpp"

#include <string>

namespace stageseat::fixture {

// 2026-03-01T00:00:00Z
inline constexpr Timestamp kEpoch = 1772323200000;

inline sentiment::Lexicon seed_lexicon()
{
    return sentiment::Lexicon::load_file(std::string(STAGESEAT_SOURCE_DIR) + "/lexicon/seed.tsv");
}

inline Id add_user(store::Store& s, const std::string& name, Role role = Role::user)
{
    UserAccount u;
    u.username = name;
    u.email = name + "@example.com";
    u.password_digest = "not-a-real-digest";
    u.role = role;
    u.created_at = kEpoch;
    return s.transact({store::Insert{u, std::nullopt}}).ids.at(0);
}

inline Id add_movie(store::Store& s, Movie m)
{
    if (m.genres.empty())
        m.genres.insert("drama");
    return s.transact({store::Insert{m, std::nullopt}}).ids.at(0);
}

inline Id add_movie(store::Store& s, const std::string& title, std::set<std::string> genres = {"drama"},
                    const std::string& release = "2026-01-15")
{
    Movie m;
    m.title = title;
    m.genres = std::move(genres);
    m.release_date = Date::parse(release);
    m.language = "English";
    return add_movie(s, m);
}

inline Id add_venue(store::Store& s, int rows, int cols, const std::string& name = "Plaza")
{
    Venue v;
    v.name = name;
    v.address = "1 Main Road";
    v.rows = rows;
    v.cols = cols;
    return s.transact({store::Insert{v, std::nullopt}}).ids.at(0);
}

inline SeatSet seats(std::initializer_list<const char*> labels)
{
    SeatSet out;
    for (const char* l : labels)
        out.insert(seat_label_parse(l));
    return out;
}

} // namespace stageseat::fixture
