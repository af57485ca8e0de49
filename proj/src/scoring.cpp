#include "ara/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ara/error.hpp"

namespace ara::scoring {

namespace {

constexpr double kMassTolerance = 1e-6;

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

// Characters allowed between a marker and its integer ("Answer: **3**", "Answer: [3]").
bool is_decoration(char c) { return is_ws(c) || c == '*' || c == '[' || c == '(' || c == '"' || c == '\''; }

struct MarkedInteger {
    long long value;
    std::size_t digit_offset;
    std::size_t end_offset;
};

MarkedInteger integer_after(std::string_view raw, std::size_t from, ErrorCode missing_code,
                            std::string_view marker) {
    const auto at = raw.find(marker, from);
    if (at == std::string_view::npos) {
        raise(missing_code, "response lacks '" + std::string(marker) + "'");
    }
    std::size_t i = at + marker.size();
    while (i < raw.size() && is_decoration(raw[i])) {
        ++i;
    }
    if (i == raw.size() || raw[i] < '0' || raw[i] > '9') {
        raise(ErrorCode::NonIntegerScore, "no integer after '" + std::string(marker) + "'");
    }
    const std::size_t begin = i;
    long long value = 0;
    while (i < raw.size() && raw[i] >= '0' && raw[i] <= '9') {
        if (value > (std::numeric_limits<long long>::max() - 9) / 10) {
            raise(ErrorCode::NonIntegerScore, "integer after '" + std::string(marker) + "' overflows");
        }
        value = value * 10 + (raw[i] - '0');
        ++i;
    }
    return {value, begin, i};
}

// Token index whose byte span covers `offset` in the concatenated token text.
std::optional<std::size_t> token_at(std::span<const std::string> tokens, std::size_t offset) {
    std::size_t begin = 0;
    for (std::size_t k = 0; k < tokens.size(); ++k) {
        const std::size_t end = begin + tokens[k].size();
        if (offset >= begin && offset < end) {
            return k;
        }
        begin = end;
    }
    return std::nullopt;
}

struct Scan {
    std::vector<double> probabilities;
    std::vector<std::uint64_t> values;
};

Scan numeric_prefix(const TokenDistribution& dist) {
    Scan scan;
    for (const auto& entry : dist.entries()) {
        const auto v = numeric_value(entry.token);
        if (!v) {
            break;
        }
        scan.probabilities.push_back(entry.probability);
        scan.values.push_back(*v);
    }
    return scan;
}

} // namespace

TokenDistribution::TokenDistribution(std::vector<TokenProb> entries, std::size_t position)
    : entries_(std::move(entries)), position_(position) {
    double total = 0.0;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const double p = entries_[i].probability;
        require(p > 0.0 && p <= 1.0, "TokenDistribution: probability outside (0, 1]");
        require(i == 0 || p <= entries_[i - 1].probability,
                "TokenDistribution: entries must be ranked by probability");
        total += p;
    }
    require(total <= 1.0 + kMassTolerance, "TokenDistribution: probabilities sum above 1");
}

TokenDistribution TokenDistribution::ranked(std::vector<TokenProb> entries, std::size_t position) {
    std::stable_sort(entries.begin(), entries.end(),
                     [](const TokenProb& a, const TokenProb& b) { return a.probability > b.probability; });
    return TokenDistribution(std::move(entries), position);
}

TokenDistribution TokenDistribution::from_logprobs(
    std::span<const std::pair<std::string, double>> logprobs, std::size_t position) {
    std::vector<TokenProb> entries;
    entries.reserve(logprobs.size());
    for (const auto& [token, logprob] : logprobs) {
        const double p = std::min(1.0, std::exp(logprob));
        if (p > 0.0) {
            entries.push_back({token, p});
        }
    }
    return ranked(std::move(entries), position);
}

std::optional<std::uint64_t> numeric_value(std::string_view token) noexcept {
    while (!token.empty() && is_ws(token.front())) token.remove_prefix(1);
    while (!token.empty() && is_ws(token.back())) token.remove_suffix(1);
    if (token.empty() || token.size() > 18) {
        return std::nullopt;
    }
    std::uint64_t value = 0;
    for (char c : token) {
        if (c < '0' || c > '9') {
            return std::nullopt;
        }
        value = value * 10 + static_cast<std::uint64_t>(c - '0');
    }
    return value;
}

ParsedResponse parse_response(std::string_view raw, std::span<const std::string> generated_tokens) {
    require(!raw.empty(), "parse_response: empty response");
    ParsedResponse out;
    out.raw_text = std::string(raw);

    const auto score = integer_after(raw, 0, ErrorCode::MissingAnswerMarker, "Answer:");
    const auto conf =
        integer_after(raw, score.end_offset, ErrorCode::MissingConfidenceMarker, "Confidence:");
    out.score_value = score.value;
    out.confidence_value = conf.value;

    constexpr std::string_view kExplanation = "Explanation:";
    if (const auto at = raw.find(kExplanation, conf.end_offset); at != std::string_view::npos) {
        auto rest = raw.substr(at + kExplanation.size());
        while (!rest.empty() && is_ws(rest.front())) rest.remove_prefix(1);
        while (!rest.empty() && is_ws(rest.back())) rest.remove_suffix(1);
        out.explanation = std::string(rest);
    }

    if (generated_tokens.empty()) {
        return out;
    }
    std::string joined;
    for (const auto& t : generated_tokens) {
        joined += t;
    }
    if (joined == raw) {
        out.score_token_position = token_at(generated_tokens, score.digit_offset);
        out.confidence_token_position = token_at(generated_tokens, conf.digit_offset);
        return out;
    }
    // Content and token stream disagree (e.g. the server trimmed whitespace):
    // locate the markers in the token stream itself.
    try {
        const auto s = integer_after(joined, 0, ErrorCode::MissingAnswerMarker, "Answer:");
        const auto c = integer_after(joined, s.end_offset, ErrorCode::MissingConfidenceMarker, "Confidence:");
        if (s.value == score.value && c.value == conf.value) {
            out.score_token_position = token_at(generated_tokens, s.digit_offset);
            out.confidence_token_position = token_at(generated_tokens, c.digit_offset);
        }
    } catch (const Error&) {
    }
    return out;
}

double expected_value_score(const TokenDistribution& dist, const prompting::ScaleSpec& scale,
                            ExpectedValueOptions options) {
    const auto scan = numeric_prefix(dist);
    if (scan.values.empty()) {
        raise(ErrorCode::TopTokenNotNumeric, "top-ranked token is not numeric");
    }
    double sum = 0.0;
    double mass = 0.0;
    for (std::size_t m = 0; m < scan.values.size(); ++m) {
        double v = static_cast<double>(scan.values[m]);
        if (options.clamp_to_scale) {
            v = std::clamp(v, static_cast<double>(scale.min()), static_cast<double>(scale.max()));
        }
        sum += scan.probabilities[m] * v;
        mass += scan.probabilities[m];
    }
    return options.renormalize ? sum / mass : sum;
}

long long vanilla_score(const TokenDistribution& dist) {
    if (dist.empty()) {
        raise(ErrorCode::TopTokenNotNumeric, "empty distribution");
    }
    const auto v = numeric_value(dist.entries().front().token);
    if (!v) {
        raise(ErrorCode::TopTokenNotNumeric, "top-ranked token is not numeric");
    }
    return static_cast<long long>(*v);
}

double confidence_weight(const TokenDistribution& conf_dist) {
    return expected_value_score(conf_dist, prompting::ScaleSpec::confidence()) / 10.0;
}

double normalized_entropy(const TokenDistribution& dist) {
    require(!dist.empty(), "normalized_entropy: empty distribution");
    const auto scan = numeric_prefix(dist);
    const auto n = scan.probabilities.size();
    if (n < 2) {
        return 0.0;
    }
    double mass = 0.0;
    for (double p : scan.probabilities) {
        mass += p;
    }
    double h = 0.0;
    for (double p : scan.probabilities) {
        const double q = p / mass;
        h -= q * std::log(q);
    }
    return std::clamp(h / std::log(static_cast<double>(n)), 0.0, 1.0);
}

} // namespace ara::scoring
