#pragma once

#include "stageseat/domain.hpp"

#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace stageseat::sentiment {

inline constexpr double kNegationFactor = -0.75;
inline constexpr double kNormalizationAlpha = 15.0;
inline constexpr double kPositiveThreshold = 0.05;
inline constexpr double kNegativeThreshold = -0.05;
inline constexpr int kNegationWindow = 3;
inline constexpr double kMaxValence = 4.0;

/// Token -> valence table plus the negator and modifier word lists.
/// Immutable once built; share it freely between threads.
class Lexicon {
public:
    /// Parses "token<TAB>kind<TAB>value" lines. Blank lines and lines starting
    /// with '#' are skipped. Negator lines may omit the value column.
    /// Throws Error(FormatError) naming the 1-based line on any bad line.
    static Lexicon load(std::istream& tsv);
    static Lexicon load_file(const std::string& path);

    void set_valence(const std::string& token, double valence);
    void add_negator(const std::string& token);
    void set_intensifier(const std::string& token, double multiplier);
    void set_downtoner(const std::string& token, double multiplier);

    [[nodiscard]] std::optional<double> valence(std::string_view token) const;
    [[nodiscard]] bool is_negator(std::string_view token) const;
    /// Multiplier of an intensifier or downtoner, if the token is one.
    [[nodiscard]] std::optional<double> modifier(std::string_view token) const;

    [[nodiscard]] const std::unordered_map<std::string, double>& valences() const { return valences_; }
    [[nodiscard]] const std::unordered_set<std::string>& negators() const { return negators_; }
    [[nodiscard]] const std::unordered_map<std::string, double>& intensifiers() const { return intensifiers_; }
    [[nodiscard]] const std::unordered_map<std::string, double>& downtoners() const { return downtoners_; }
    [[nodiscard]] bool empty() const;

private:
    void forget(const std::string& token);

    std::unordered_map<std::string, double> valences_;
    std::unordered_set<std::string> negators_;
    std::unordered_map<std::string, double> intensifiers_;
    std::unordered_map<std::string, double> downtoners_;
};

/// Lowercased tokens split on anything other than a letter, digit or
/// apostrophe, with a trailing "n't" split off as its own token.
/// Bytes >= 0x80 count as letters so UTF-8 words stay intact.
std::vector<std::string> tokenize(std::string_view text);

/// raw / sqrt(raw^2 + 15)
double normalize(double raw_sum);

SentimentLabel classify(double compound);

SentimentScore score_text(const Lexicon& lex, std::string_view text);

struct AggregateSentiment {
    int n_reviews = 0;
    int n_positive = 0;
    int n_negative = 0;
    int n_neutral = 0;
    double mean_compound = 0.0;

    friend bool operator==(const AggregateSentiment&, const AggregateSentiment&) = default;
};

AggregateSentiment aggregate_reviews(std::span<const SentimentScore> scores);

} // namespace stageseat::sentiment
