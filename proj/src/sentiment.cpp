#include "stageseat/sentiment.hpp"

#include "stageseat/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace stageseat::sentiment {

namespace {

std::vector<std::string_view> split_tabs(std::string_view line)
{
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto tab = line.find('\t', start);
        fields.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
        if (tab == std::string_view::npos)
            break;
        start = tab + 1;
    }
    return fields;
}

std::optional<double> parse_number(std::string_view text)
{
    // from_chars for double is available in libstdc++ 11.
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value))
        return std::nullopt;
    return value;
}

bool is_token_byte(unsigned char c)
{
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '\'' || c >= 0x80;
}

} // namespace

Lexicon Lexicon::load(std::istream& tsv)
{
    Lexicon lex;
    std::string line;
    int line_no = 0;
    while (std::getline(tsv, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line.front() == '#')
            continue;

        auto fail = [&](const std::string& why) {
            return Error(ErrorCode::FormatError, "lexicon line " + std::to_string(line_no) + ": " + why);
        };

        const auto fields = split_tabs(line);
        if (fields.size() < 2 || fields.size() > 3)
            throw fail("expected token<TAB>kind<TAB>value");
        const std::string token = to_lower(fields[0]);
        const std::string_view kind = fields[1];
        if (token.empty())
            throw fail("empty token");

        if (kind == "negator") {
            lex.add_negator(token);
            continue;
        }
        if (fields.size() != 3)
            throw fail("missing value column");
        const auto value = parse_number(fields[2]);
        if (!value)
            throw fail("value is not a finite number");

        if (kind == "valence") {
            if (std::abs(*value) > kMaxValence)
                throw fail("valence outside [-4, 4]");
            lex.set_valence(token, *value);
        } else if (kind == "intensifier") {
            if (!(*value > 1.0))
                throw fail("intensifier multiplier must be > 1");
            lex.set_intensifier(token, *value);
        } else if (kind == "downtoner") {
            if (!(*value > 0.0 && *value < 1.0))
                throw fail("downtoner multiplier must be in (0, 1)");
            lex.set_downtoner(token, *value);
        } else {
            throw fail("unknown kind '" + std::string(kind) + "'");
        }
    }
    return lex;
}

Lexicon Lexicon::load_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::FormatError, "cannot open lexicon file " + path);
    return load(in);
}

// A later entry for the same token replaces whatever kind it had before, so the
// four tables stay disjoint.
void Lexicon::forget(const std::string& token)
{
    valences_.erase(token);
    negators_.erase(token);
    intensifiers_.erase(token);
    downtoners_.erase(token);
}

void Lexicon::set_valence(const std::string& token, double valence)
{
    forget(token);
    valences_[token] = valence;
}

void Lexicon::add_negator(const std::string& token)
{
    forget(token);
    negators_.insert(token);
}

void Lexicon::set_intensifier(const std::string& token, double multiplier)
{
    forget(token);
    intensifiers_[token] = multiplier;
}

void Lexicon::set_downtoner(const std::string& token, double multiplier)
{
    forget(token);
    downtoners_[token] = multiplier;
}

std::optional<double> Lexicon::valence(std::string_view token) const
{
    auto it = valences_.find(std::string(token));
    if (it == valences_.end())
        return std::nullopt;
    return it->second;
}

bool Lexicon::is_negator(std::string_view token) const
{
    return negators_.contains(std::string(token));
}

std::optional<double> Lexicon::modifier(std::string_view token) const
{
    const std::string key(token);
    if (auto it = intensifiers_.find(key); it != intensifiers_.end())
        return it->second;
    if (auto it = downtoners_.find(key); it != downtoners_.end())
        return it->second;
    return std::nullopt;
}

bool Lexicon::empty() const
{
    return valences_.empty() && negators_.empty() && intensifiers_.empty() && downtoners_.empty();
}

std::vector<std::string> tokenize(std::string_view text)
{
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (current.empty())
            return;
        constexpr std::string_view suffix = "n't";
        if (current.size() > suffix.size() && current.ends_with(suffix)) {
            tokens.push_back(current.substr(0, current.size() - suffix.size()));
            tokens.emplace_back(suffix);
        } else {
            tokens.push_back(current);
        }
        current.clear();
    };
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (is_token_byte(c)) {
            current.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : ch);
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

double normalize(double raw_sum)
{
    return raw_sum / std::sqrt(raw_sum * raw_sum + kNormalizationAlpha);
}

SentimentLabel classify(double compound)
{
    if (compound >= kPositiveThreshold)
        return SentimentLabel::positive;
    if (compound <= kNegativeThreshold)
        return SentimentLabel::negative;
    return SentimentLabel::neutral;
}

SentimentScore score_text(const Lexicon& lex, std::string_view text)
{
    const auto tokens = tokenize(text);
    SentimentScore score;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto base = lex.valence(tokens[i]);
        if (!base)
            continue;
        ++score.hit_count;
        double v = *base;

        // Modifier: the closest preceding token that is not a negator.
        std::size_t j = i;
        while (j > 0 && lex.is_negator(tokens[j - 1]))
            --j;
        if (j > 0) {
            if (auto m = lex.modifier(tokens[j - 1]))
                v *= *m;
        }

        // Negation applies once, whichever negator in the window is nearest.
        for (std::size_t k = 1; k <= kNegationWindow && k <= i; ++k) {
            if (lex.is_negator(tokens[i - k])) {
                v *= kNegationFactor;
                break;
            }
        }
        score.raw_sum += v;
    }
    score.compound = normalize(score.raw_sum);
    score.label = classify(score.compound);
    return score;
}

AggregateSentiment aggregate_reviews(std::span<const SentimentScore> scores)
{
    AggregateSentiment agg;
    double total = 0.0;
    for (const auto& s : scores) {
        ++agg.n_reviews;
        switch (s.label) {
        case SentimentLabel::positive: ++agg.n_positive; break;
        case SentimentLabel::negative: ++agg.n_negative; break;
        case SentimentLabel::neutral: ++agg.n_neutral; break;
        }
        total += s.compound;
    }
    if (agg.n_reviews > 0)
        agg.mean_compound = total / agg.n_reviews;
    return agg;
}

} // namespace stageseat::sentiment
