#include "ara/ensemble.hpp"

#include <cmath>

#include "ara/error.hpp"
#include "log.hpp"

namespace ara::ensemble {

std::string_view to_string(Variant v) noexcept {
    switch (v) {
    case Variant::laurae: return "laurae";
    case Variant::naive: return "naive";
    case Variant::entropy: return "entropy";
    case Variant::minmax: return "minmax";
    case Variant::agg: return "agg";
    }
    return "?";
}

std::string_view to_string(ShallowSource s) noexcept {
    return s == ShallowSource::formula ? "formula" : "rsrs";
}

namespace {

double population_sd(const VectorRef& v, double mean) {
    return std::sqrt((v.array() - mean).square().sum() / static_cast<double>(v.size()));
}

} // namespace

DatasetStats dataset_stats(const VectorRef& llm_scores, const VectorRef& shallow_scores) {
    require(llm_scores.size() == shallow_scores.size(), "LLM and shallow score lists differ in length");
    require(llm_scores.size() >= 2, "dataset statistics need at least two texts");
    require(llm_scores.allFinite() && shallow_scores.allFinite(), "scores must be finite");
    DatasetStats s;
    s.n = static_cast<std::size_t>(llm_scores.size());
    s.mu_llm = llm_scores.mean();
    s.mu_rf = shallow_scores.mean();
    s.sigma_llm = population_sd(llm_scores, s.mu_llm);
    s.sigma_rf = population_sd(shallow_scores, s.mu_rf);
    if (!(s.sigma_llm > 0.0)) raise(ErrorCode::ZeroVariance, "LLM scores are constant over the dataset");
    if (!(s.sigma_rf > 0.0)) raise(ErrorCode::ZeroVariance, "shallow scores are constant over the dataset");
    return s;
}

double laurae_score(double s_llm, double s_rf, double c, const DatasetStats& stats) {
    require(c >= 0.0 && c <= 1.0, "weight must lie in [0, 1]");
    require(stats.sigma_llm > 0.0 && stats.sigma_rf > 0.0, "dataset standard deviations must be positive");
    return c * ((s_llm - stats.mu_llm) / stats.sigma_llm) + (1.0 - c) * ((s_rf - stats.mu_rf) / stats.sigma_rf);
}

Vector laurae_scores(const VectorRef& llm, const VectorRef& shallow, const VectorRef& weights,
                     const DatasetStats& stats) {
    require(llm.size() == shallow.size() && llm.size() == weights.size(), "score and weight lists differ in length");
    Vector out(llm.size());
    for (Eigen::Index i = 0; i < llm.size(); ++i) {
        out[i] = laurae_score(llm[i], shallow[i], weights[i], stats);
    }
    return out;
}

ConfidenceSummary summarize_confidences(const VectorRef& confidences) {
    ConfidenceSummary s;
    s.n = static_cast<std::size_t>(confidences.size());
    if (s.n == 0) return s;
    s.min = confidences.minCoeff();
    s.max = confidences.maxCoeff();
    // A constant column must average to exactly its value, so agg reduces to laurae.
    s.mean = s.min == s.max ? s.min : confidences.mean();
    return s;
}

bool minmax_degenerate(const ConfidenceSummary& dataset) noexcept { return !(dataset.max > dataset.min); }

double variant_weight(Variant variant, const TextSignals& text, const ConfidenceSummary& dataset) {
    auto need_c = [&] {
        require(text.confidence.has_value(), std::string(to_string(variant)) + " needs a confidence weight");
        return *text.confidence;
    };
    switch (variant) {
    case Variant::laurae:
        return need_c();
    case Variant::naive:
        return 0.5;
    case Variant::entropy:
        require(text.entropy.has_value(), "entropy variant needs the score-position entropy");
        return 1.0 - *text.entropy;
    case Variant::minmax: {
        const double c = need_c();
        require(dataset.n > 0, "minmax needs the dataset confidences");
        if (minmax_degenerate(dataset)) {
            detail::logger().warn("DegenerateRange: confidences are constant at {}; minmax weight falls back to 0.5",
                                  dataset.min);
            return 0.5;
        }
        return (c - dataset.min) / (dataset.max - dataset.min);
    }
    case Variant::agg:
        require(dataset.n > 0, "agg needs the dataset confidences");
        return dataset.mean;
    }
    raise(ErrorCode::PreconditionViolation, "unknown ensemble variant");
}

} // namespace ara::ensemble
