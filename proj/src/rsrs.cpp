#include "ara/rsrs.hpp"

#include <algorithm>
#include <cmath>

#include "ara/error.hpp"
#include "ara/textmetrics.hpp"
#include "log.hpp"

namespace ara::rsrs {

namespace {

double clamp_p(double p) { return std::clamp(p, kEpsilon, 1.0 - kEpsilon); }

} // namespace

double wnll(std::size_t target_index, std::span<const double> y_p, WnllMode mode) {
    if (target_index >= y_p.size()) {
        raise(ErrorCode::DimensionMismatch, "target index " + std::to_string(target_index) +
                                                " outside a distribution of size " + std::to_string(y_p.size()));
    }
    double total = std::log(clamp_p(y_p[target_index]));
    if (mode == WnllMode::full_vector) {
        for (std::size_t j = 0; j < y_p.size(); ++j) {
            if (j != target_index) total += std::log(1.0 - clamp_p(y_p[j]));
        }
    }
    return -total;
}

double sentence_rsrs(std::span<const double> wnlls) {
    if (wnlls.empty()) raise(ErrorCode::EmptySentence, "sentence has no scored tokens");
    std::vector<double> sorted(wnlls.begin(), wnlls.end());
    std::sort(sorted.begin(), sorted.end());
    double total = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        total += std::sqrt(static_cast<double>(i + 1)) * sorted[i];
    }
    return total / static_cast<double>(sorted.size());
}

SentenceWnll sentence_wnlls(std::string_view sentence, Language lang, providers::FillMaskProvider& provider,
                            RsrsOptions options, std::size_t* skipped_words) {
    SentenceWnll out;
    out.sentence = std::string(sentence);

    struct Word {
        std::string text;
        std::size_t first_piece;
        std::size_t piece_count;
    };
    std::vector<Word> words;
    std::vector<std::string> pieces;
    for (auto& w : text::tokenize_words(sentence, lang)) {
        try {
            auto split = provider.split_word(w);
            words.push_back({std::move(w), pieces.size(), split.pieces.size()});
            pieces.insert(pieces.end(), split.pieces.begin(), split.pieces.end());
        } catch (const Error& e) {
            if (e.code() != ErrorCode::TokenNotInVocabulary) throw;
            detail::logger().warn("word '{}' skipped: {}", w, e.what());
            if (skipped_words) ++*skipped_words;
        }
    }

    const bool full = options.mode == WnllMode::full_vector;
    for (const auto& word : words) {
        double total = 0.0;
        for (std::size_t k = 0; k < word.piece_count; ++k) {
            const std::size_t index = word.first_piece + k;
            providers::FillMaskQuery q{pieces, index, pieces[index], full};
            const auto result = provider.fill_mask(q);
            if (full) {
                total += wnll(*result.target_index, *result.full_distribution, WnllMode::full_vector);
            } else {
                const double p = result.target_probability;
                total += wnll(0, std::span<const double>(&p, 1), WnllMode::target_only);
            }
        }
        out.token_wnlls.emplace_back(word.text, total);
    }
    out.s = out.token_wnlls.size();
    return out;
}

RsrsScore document_rsrs(std::string_view text, Language lang, providers::FillMaskProvider& provider,
                        RsrsOptions options) {
    RsrsScore score;
    for (const auto& sentence : text::segment_sentences(text, lang)) {
        auto sw = sentence_wnlls(sentence, lang, provider, options, &score.skipped_words);
        if (sw.token_wnlls.empty()) {
            detail::logger().warn("sentence skipped, no word could be scored: '{}'", sentence);
            ++score.skipped_sentences;
            continue;
        }
        std::vector<double> values;
        values.reserve(sw.token_wnlls.size());
        for (const auto& [_, v] : sw.token_wnlls) values.push_back(v);
        score.sentence_scores.push_back(sentence_rsrs(values));
        score.sentences.push_back(std::move(sw));
    }
    if (score.sentence_scores.empty()) {
        raise(ErrorCode::TokenNotInVocabulary, "no sentence of the text could be scored");
    }
    double sum = 0.0;
    for (double v : score.sentence_scores) sum += v;
    score.value = sum / static_cast<double>(score.sentence_scores.size());
    return score;
}

} // namespace ara::rsrs
