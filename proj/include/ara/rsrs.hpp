#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ara/language.hpp"
#include "ara/providers.hpp"

namespace ara::rsrs {

enum class WnllMode {
    full_vector, ///< -[ln y[t] + sum_{j != t} ln(1 - y[j])]
    target_only, ///< -ln y[t]
};

inline constexpr double kEpsilon = 1e-12;

/// Word negative log-likelihood of `target_index` under `y_p`, with every
/// probability clamped to [eps, 1 - eps] first. Throws DimensionMismatch.
double wnll(std::size_t target_index, std::span<const double> y_p, WnllMode mode = WnllMode::full_vector);

/// Sorts ascending and returns sum_i sqrt(i) * w_(i) / s. Throws EmptySentence.
double sentence_rsrs(std::span<const double> wnlls);

struct SentenceWnll {
    std::string sentence;
    std::vector<std::pair<std::string, double>> token_wnlls; ///< one per scored word
    std::size_t s = 0;
};

struct RsrsScore {
    double value = 0.0;
    std::vector<double> sentence_scores;
    std::vector<SentenceWnll> sentences;
    std::size_t skipped_sentences = 0;
    std::size_t skipped_words = 0;
};

struct RsrsOptions {
    WnllMode mode = WnllMode::full_vector;
};

/// Scores every sentence of `text` independently. A word the provider cannot
/// place in mask slots is skipped; a sentence left without words is skipped
/// with a warning. Multi-piece words sum the WNLL of each piece, each masked
/// in turn with the others visible. Throws TokenNotInVocabulary if no
/// sentence can be scored.
RsrsScore document_rsrs(std::string_view text, Language lang, providers::FillMaskProvider& provider,
                        RsrsOptions options = {});

/// The scoring of one already-segmented sentence.
SentenceWnll sentence_wnlls(std::string_view sentence, Language lang, providers::FillMaskProvider& provider,
                            RsrsOptions options, std::size_t* skipped_words = nullptr);

} // namespace ara::rsrs
