#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ara/prompting.hpp"

namespace ara::scoring {

struct TokenProb {
    std::string token;
    double probability;
    friend bool operator==(const TokenProb&, const TokenProb&) = default;
};

/// Ranked alternatives for one generated position, most probable first.
/// Top-k truncation means the probabilities may sum to less than one.
class TokenDistribution {
public:
    /// Entries must already be ranked (non-increasing probability, ties in
    /// provider order), with each probability in (0, 1] and a total of at
    /// most 1 + 1e-6. Throws PreconditionViolation otherwise.
    explicit TokenDistribution(std::vector<TokenProb> entries, std::size_t position = 0);

    /// Stable-sorts by probability, keeping provider order among ties.
    static TokenDistribution ranked(std::vector<TokenProb> entries, std::size_t position = 0);

    /// Exponentiates natural-log probabilities; entries that underflow to 0 are dropped.
    static TokenDistribution from_logprobs(std::span<const std::pair<std::string, double>> logprobs,
                                           std::size_t position = 0);

    const std::vector<TokenProb>& entries() const noexcept { return entries_; }
    std::size_t position() const noexcept { return position_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }

    friend bool operator==(const TokenDistribution&, const TokenDistribution&) = default;

private:
    std::vector<TokenProb> entries_;
    std::size_t position_;
};

/// The value of a token that, after trimming whitespace, is a non-negative
/// base-10 integer; nullopt otherwise.
std::optional<std::uint64_t> numeric_value(std::string_view token) noexcept;

struct ParsedResponse {
    std::string raw_text;
    std::optional<std::size_t> score_token_position;
    long long score_value = 0;
    std::optional<std::size_t> confidence_token_position;
    long long confidence_value = 0;
    std::string explanation;
};

/// Reads "Answer: <int> Confidence: <int> Explanation: <text>". The first
/// "Answer:" marker wins; "Confidence:" and "Explanation:" are searched after
/// it. `generated_tokens` is the sampled token at each position; when their
/// concatenation lines up with `raw`, the positions of the two integers are
/// recorded so their alternatives can be looked up.
ParsedResponse parse_response(std::string_view raw, std::span<const std::string> generated_tokens = {});

struct ExpectedValueOptions {
    bool renormalize = false;    ///< divide by the scanned probability mass
    bool clamp_to_scale = false; ///< clamp each scanned value into the scale
};

/// Sum of probability * value over the leading run of numeric alternatives,
/// stopping at the first non-numeric token. Throws TopTokenNotNumeric.
double expected_value_score(const TokenDistribution& dist, const prompting::ScaleSpec& scale,
                            ExpectedValueOptions options = {});

/// The integer of the top-ranked token. Throws TopTokenNotNumeric.
long long vanilla_score(const TokenDistribution& dist);

/// Expected value on the 1-9 confidence scale divided by 10.
double confidence_weight(const TokenDistribution& conf_dist);

/// Shannon entropy of the scanned numeric alternatives (renormalized to sum
/// to one), divided by ln(count) so that it lies in [0, 1]. Zero when fewer
/// than two alternatives are scanned. The LLM term weight is 1 - H.
double normalized_entropy(const TokenDistribution& dist);

} // namespace ara::scoring
