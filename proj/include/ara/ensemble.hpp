#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace ara::ensemble {

using Vector = Eigen::VectorXd;
using VectorRef = Eigen::Ref<const Eigen::VectorXd>;

enum class Variant { laurae, naive, entropy, minmax, agg };
enum class ShallowSource { formula, rsrs };

std::string_view to_string(Variant v) noexcept;
std::string_view to_string(ShallowSource s) noexcept;

struct EnsembleConfig {
    Variant variant = Variant::laurae;
    ShallowSource shallow_source = ShallowSource::formula;
    friend bool operator==(const EnsembleConfig&, const EnsembleConfig&) = default;
};

/// Population means and standard deviations of the LLM and shallow scores
/// over one dataset.
struct DatasetStats {
    double mu_llm = 0.0;
    double sigma_llm = 1.0;
    double mu_rf = 0.0;
    double sigma_rf = 1.0;
    std::size_t n = 0;
};

/// Requires equal lengths of at least 2; throws ZeroVariance if either list
/// is constant.
DatasetStats dataset_stats(const VectorRef& llm_scores, const VectorRef& shallow_scores);

/// c * (s_llm - mu_llm) / sigma_llm + (1 - c) * (s_rf - mu_rf) / sigma_rf
double laurae_score(double s_llm, double s_rf, double c, const DatasetStats& stats);

/// Element-wise laurae_score with a per-text weight.
Vector laurae_scores(const VectorRef& llm, const VectorRef& shallow, const VectorRef& weights,
                     const DatasetStats& stats);

/// Dataset-level view of the confidence weights, needed by minmax and agg.
struct ConfidenceSummary {
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    std::size_t n = 0;
};

ConfidenceSummary summarize_confidences(const VectorRef& confidences);

struct TextSignals {
    std::optional<double> confidence; ///< c, verbal confidence / 10
    std::optional<double> entropy;    ///< normalized entropy H of the score position
};

/// Weight of the LLM term: laurae -> c, naive -> 0.5, entropy -> 1 - H,
/// minmax -> (c - min) / (max - min), agg -> mean c. When minmax meets a
/// constant confidence column the weight falls back to 0.5 with a warning.
double variant_weight(Variant variant, const TextSignals& text, const ConfidenceSummary& dataset);

/// True when minmax has no spread to normalize over.
bool minmax_degenerate(const ConfidenceSummary& dataset) noexcept;

} // namespace ara::ensemble
