#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ara/providers.hpp"

namespace ara::test {

// Five-token vocabulary and a three-sentence corpus made only of it.
inline const std::vector<std::string> kToyVocab{"the", "cat", "sat", "on", "mat"};
inline const std::string kToyCorpus = "the cat sat. on the mat the cat sat. mat on cat.";
inline const std::vector<std::vector<std::string>> kToySentences{
    {"the", "cat", "sat"}, {"on", "the", "mat", "the", "cat", "sat"}, {"mat", "on", "cat"}};

/// Deterministic, position-dependent distribution over the toy vocabulary.
inline std::vector<double> toy_distribution(std::size_t masked_index, std::size_t length) {
    std::vector<double> w(kToyVocab.size());
    double total = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
        w[j] = 1.0 + static_cast<double>((j * 3 + masked_index * 2 + length) % 7);
        total += w[j];
    }
    for (auto& x : w) x /= total;
    return w;
}

inline std::shared_ptr<providers::MockFillMaskProvider> toy_provider() {
    return std::make_shared<providers::MockFillMaskProvider>(
        kToyVocab, [](const providers::FillMaskQuery& q) { return toy_distribution(q.masked_index, q.tokens.size()); });
}

/// Straight-line RSRS: per word, the negative log-likelihood of the word at
/// its masked position (optionally with the log(1 - y) terms over the rest
/// of the vocabulary); per sentence, sum over ranks of sqrt(rank) * WNLL / s;
/// per document, the mean over sentences.
inline double toy_rsrs_oracle(bool full_vector) {
    const double eps = 1e-12;
    double doc = 0.0;
    for (const auto& sentence : kToySentences) {
        std::vector<double> w;
        for (std::size_t i = 0; i < sentence.size(); ++i) {
            const auto y = toy_distribution(i, sentence.size());
            const auto t = static_cast<std::size_t>(
                std::find(kToyVocab.begin(), kToyVocab.end(), sentence[i]) - kToyVocab.begin());
            double v = -std::log(std::clamp(y[t], eps, 1.0 - eps));
            if (full_vector) {
                for (std::size_t j = 0; j < y.size(); ++j) {
                    if (j != t) v -= std::log(1.0 - std::clamp(y[j], eps, 1.0 - eps));
                }
            }
            w.push_back(v);
        }
        std::sort(w.begin(), w.end());
        double s = 0.0;
        for (std::size_t r = 0; r < w.size(); ++r) s += std::sqrt(static_cast<double>(r + 1)) * w[r];
        doc += s / static_cast<double>(w.size());
    }
    return doc / static_cast<double>(kToySentences.size());
}

} // namespace ara::test
