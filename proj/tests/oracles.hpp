#pragma once

// Brute-force reference implementations used by the unit tests and the
// acceptance runner. Each one is written from the rule text and avoids the
// production helpers it is meant to check.

#include "stageseat/catalog.hpp"
#include "stageseat/store.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace stageseat::oracle {

// --- sentiment ---------------------------------------------------------------

// Seed lexicon values typed in by hand rather than read from the shipped file.
struct Sentiment {
    std::map<std::string, double> valence{{"good", 1.9},    {"great", 3.1},    {"excellent", 3.2}, {"masterpiece", 3.6},
                                          {"love", 3.2},    {"bad", -2.5},     {"terrible", -3.4}, {"hate", -3.2},
                                          {"boring", -1.3}, {"mediocre", -1.0}};
    std::set<std::string> negators{"not", "no", "never", "n't", "hardly"};
    std::map<std::string, double> modifiers{{"very", 1.5},     {"extremely", 1.8}, {"absolutely", 1.6},
                                            {"slightly", 0.5}, {"somewhat", 0.6},  {"barely", 0.4}};

    static std::vector<std::string> tokens(const std::string& text)
    {
        std::string spaced;
        for (char ch : text) {
            const auto c = static_cast<unsigned char>(ch);
            const bool keep = std::isalnum(c) || c == '\'' || c >= 0x80;
            spaced += keep ? static_cast<char>(std::tolower(c)) : ' ';
        }
        std::istringstream in(spaced);
        std::vector<std::string> out;
        std::string w;
        while (in >> w) {
            if (w.size() > 3 && w.substr(w.size() - 3) == "n't") {
                out.push_back(w.substr(0, w.size() - 3));
                out.push_back("n't");
            } else {
                out.push_back(w);
            }
        }
        return out;
    }

    double raw(const std::string& text) const
    {
        const auto t = tokens(text);
        double sum = 0;
        for (int i = 0; i < static_cast<int>(t.size()); ++i) {
            auto it = valence.find(t[i]);
            if (it == valence.end())
                continue;
            double v = it->second;
            int j = i - 1;
            while (j >= 0 && negators.count(t[j]))
                --j;
            if (j >= 0 && modifiers.count(t[j]))
                v *= modifiers.at(t[j]);
            bool negated = false;
            for (int k = std::max(0, i - 3); k < i; ++k)
                negated = negated || negators.count(t[k]) > 0;
            if (negated)
                v *= -0.75;
            sum += v;
        }
        return sum;
    }

    double compound(const std::string& text) const
    {
        const double r = raw(text);
        return r / std::sqrt(r * r + 15.0);
    }
};

inline std::string random_review_text(std::mt19937_64& rng)
{
    static const std::vector<std::string> vocab{
        "good",     "great",    "excellent", "masterpiece", "love",   "bad",    "terrible",   "hate",   "boring",
        "mediocre", "not",      "no",        "never",       "hardly", "very",   "extremely",  "absolutely",
        "slightly", "somewhat", "barely",    "movie",       "the",    "plot",   "wasn't",     "isn't",  "don't",
        "GOOD",     "Not",      "n't",       "a",           "it",     "caf\xc3\xa9", "3d",  "can't",  "VERY"};
    static const std::vector<std::string> seps{" ", "  ", ", ", "! ", "... ", "\t", "-", "?", "\n"};
    std::string text;
    const int n = static_cast<int>(rng() % 14);
    for (int k = 0; k < n; ++k) {
        text += vocab[rng() % vocab.size()];
        text += seps[rng() % seps.size()];
    }
    if (rng() % 10 == 0)
        text += static_cast<char>(rng() % 256);
    return text;
}

// --- search ------------------------------------------------------------------

inline std::string lower(const std::string& s)
{
    std::string out = s;
    for (auto& c : out)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

inline bool has(const std::string& hay, const std::string& needle)
{
    return lower(hay).find(lower(needle)) != std::string::npos;
}

// Ids of matching movies in the documented order.
inline std::vector<Id> search(const store::Store& s, const catalog::SearchQuery& q)
{
    struct Row {
        Id id;
        int tier;
        long popularity;
        long rating_sum;
        long rating_n;
        std::string release;
    };
    return s.read([&](const store::View& v) {
        std::map<Id, Id> show_movie;
        for (const auto& [id, row] : v.all<Show>())
            show_movie[id] = row.value.movie_id;
        std::map<Id, long> popularity;
        for (const auto& [id, row] : v.all<Booking>())
            if (row.value.status == BookingStatus::active)
                ++popularity[show_movie.at(row.value.show_id)];
        std::map<Id, std::pair<long, long>> ratings;
        for (const auto& [id, row] : v.all<Review>()) {
            ratings[row.value.movie_id].first += row.value.rating;
            ratings[row.value.movie_id].second += 1;
        }

        const std::string text = q.text.value_or("");
        std::vector<Row> rows;
        for (const auto& [id, row] : v.all<Movie>()) {
            const Movie& m = row.value;
            int tier = 0;
            if (!text.empty()) {
                bool in_people = has(m.director, text);
                for (const auto& c : m.cast)
                    in_people = in_people || has(c, text);
                tier = has(m.title, text) ? 3 : in_people ? 2 : has(m.description, text) ? 1 : 0;
                if (tier == 0)
                    continue;
            }
            if (q.genre) {
                bool any = false;
                for (const auto& g : m.genres)
                    any = any || lower(g) == lower(*q.genre);
                if (!any)
                    continue;
            }
            if (q.language && lower(m.language) != lower(*q.language))
                continue;
            const std::string release = m.release_date.to_string();
            if (q.date_from && release < q.date_from->to_string())
                continue;
            if (q.date_to && release > q.date_to->to_string())
                continue;
            const auto [sum, n] = ratings.count(id) ? ratings.at(id) : std::pair<long, long>{0, 0};
            // mean >= min_rating without dividing.
            if (q.min_rating && (n == 0 || static_cast<double>(sum) < *q.min_rating * static_cast<double>(n)))
                continue;
            rows.push_back(Row{id, tier, popularity.count(id) ? popularity.at(id) : 0, sum, n, release});
        }

        // Insertion sort with an explicit "comes before" test keeps this
        // independent of the comparator plumbing in the product code.
        auto before = [&](const Row& a, const Row& b) {
            switch (q.sort) {
            case catalog::SortKey::relevance:
                if (a.tier != b.tier)
                    return a.tier > b.tier;
                break;
            case catalog::SortKey::popularity:
                if (a.popularity != b.popularity)
                    return a.popularity > b.popularity;
                break;
            case catalog::SortKey::release_date:
                if (a.release != b.release)
                    return a.release > b.release;
                break;
            case catalog::SortKey::rating: {
                // Unrated counts as 0; compare sums cross-multiplied.
                const long lhs = a.rating_n ? a.rating_sum * (b.rating_n ? b.rating_n : 1) : 0;
                const long rhs = b.rating_n ? b.rating_sum * (a.rating_n ? a.rating_n : 1) : 0;
                if (lhs != rhs)
                    return lhs > rhs;
                break;
            }
            }
            return a.id < b.id;
        };
        std::vector<Row> sorted;
        for (const auto& r : rows) {
            auto pos = sorted.begin();
            while (pos != sorted.end() && before(*pos, r))
                ++pos;
            sorted.insert(pos, r);
        }
        std::vector<Id> out;
        for (const auto& r : sorted)
            out.push_back(r.id);
        return out;
    });
}

inline catalog::SearchQuery random_query(std::mt19937_64& rng, const std::vector<Movie>& movies)
{
    static const std::vector<std::string> words{"god",  "SILENT", "rao",   "drama", "asha", "kingdom", "",   "zzz",
                                                "the",  "a",      "Tide",  "sharma", "ORBIT", "letter", "of", "s, "};
    static const std::vector<std::string> genres{"drama", "comedy", "Action", "thriller", "romance",
                                                 "horror", "sci-fi", "animation", "western"};
    static const std::vector<std::string> languages{"Hindi", "english", "Tamil", "Telugu", "Malayalam", "Bengali",
                                                    "French"};
    catalog::SearchQuery q;
    const auto roll = [&](int pct) { return static_cast<int>(rng() % 100) < pct; };
    if (roll(60)) {
        if (roll(50) && !movies.empty()) {
            const auto& m = movies[rng() % movies.size()];
            const std::string& field = roll(50) ? m.title : m.director;
            const std::size_t len = 2 + rng() % 4;
            const std::size_t start = field.size() > len ? rng() % (field.size() - len) : 0;
            q.text = field.substr(start, len);
        } else {
            q.text = words[rng() % words.size()];
        }
    }
    if (roll(25))
        q.genre = genres[rng() % genres.size()];
    if (roll(20))
        q.language = languages[rng() % languages.size()];
    const Date base = Date::parse("2025-06-01");
    if (roll(25))
        q.date_from = base.plus_days(static_cast<int>(rng() % 300) - 150);
    if (roll(25)) {
        q.date_to = base.plus_days(static_cast<int>(rng() % 300) - 150);
        if (q.date_from && *q.date_to < *q.date_from)
            std::swap(*q.date_from, *q.date_to);
    }
    if (roll(20))
        q.min_rating = 1.0 + static_cast<double>(rng() % 9) * 0.5;
    q.sort = static_cast<catalog::SortKey>(rng() % 4);
    return q;
}

// --- percentile --------------------------------------------------------------

// Nearest rank by scanning: the smallest sample value v such that at least
// p percent of the samples are <= v. `p_tenths` is p in tenths of a percent.
inline double percentile_by_rank_scan(const std::vector<double>& samples, int p_tenths)
{
    const long n = static_cast<long>(samples.size());
    double best = 0;
    bool found = false;
    for (double candidate : samples) {
        long at_or_below = 0;
        for (double x : samples)
            at_or_below += x <= candidate ? 1 : 0;
        if (at_or_below * 1000 >= static_cast<long>(p_tenths) * n && (!found || candidate < best)) {
            best = candidate;
            found = true;
        }
    }
    return best;
}

} // namespace stageseat::oracle
