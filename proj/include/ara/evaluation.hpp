#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "ara/datasets.hpp"

namespace ara::evaluation {

using VectorRef = Eigen::Ref<const Eigen::VectorXd>;

/// Product-moment correlation. Requires equal lengths of at least 3; throws
/// ConstantSeries when either series is constant.
double pearson(const VectorRef& x, const VectorRef& y);
double pearson(std::span<const double> x, std::span<const double> y);

struct PairwiseResult {
    double accuracy = 0.0;
    std::size_t correct = 0;
    std::size_t ties = 0;
    std::size_t wrong = 0;
    std::size_t n = 0;
};

/// Scores are difficulty-aligned (higher = harder). A pair is correct iff the
/// labelled-simpler text scores strictly lower; equal scores are ties and
/// count as incorrect.
PairwiseResult pairwise_accuracy(std::span<const std::pair<double, double>> predictions,
                                 std::span<const datasets::Simpler> labels);

/// Per-pair correctness under the same rule.
std::vector<bool> pairwise_correctness(std::span<const std::pair<double, double>> predictions,
                                       std::span<const datasets::Simpler> labels);

struct TestResult {
    std::string test;
    double statistic = 0.0;
    double p_value = 1.0;
    std::optional<double> df;
};

/// Williams's t as modified by Steiger for two dependent correlations that
/// share one variable: r12 and r13 against the shared variable, r23 between
/// the two others. Two-sided p from Student's t with n - 3 df.
TestResult steiger_test(double r12, double r13, double r23, std::size_t n);

/// b = pairs only method 1 got right, c = only method 2. Continuity-corrected
/// chi-squared when b + c >= 25, otherwise the exact two-sided binomial test.
TestResult mcnemar(std::size_t b, std::size_t c);

/// Linear interpolation between closest ranks, q in [0, 1].
double percentile(std::span<const double> values, double q);

struct GroupCorrelation {
    std::optional<double> r;
    std::size_t n = 0;
    std::optional<std::string> error;
};

struct QuartileAnalysis {
    double p25 = 0.0;
    double p75 = 0.0;
    GroupCorrelation top;    ///< confidence >= p75
    GroupCorrelation bottom; ///< confidence <= p25
    std::optional<double> gap; ///< top - bottom, when both exist
};

QuartileAnalysis confidence_quartile_analysis(std::span<const double> scores, std::span<const double> confidences,
                                              std::span<const double> truth);

// -------------------------------------------------------------- report

struct MethodMetric {
    std::string method;
    std::string metric; ///< "pearson" or "pairwise_accuracy"
    std::optional<double> value;
    std::size_t scored = 0;
    std::size_t unscored = 0;
    std::optional<std::size_t> ties;
    std::optional<std::string> error;
};

struct PairwiseTest {
    std::string method_a;
    std::string method_b;
    std::size_t n = 0;
    TestResult result;
    std::optional<std::string> error;
};

struct EvaluationReport {
    std::string dataset_id;
    datasets::DatasetKind kind = datasets::DatasetKind::rating;
    std::size_t items = 0;
    std::vector<MethodMetric> metrics;
    std::vector<PairwiseTest> tests;
    std::map<std::string, QuartileAnalysis> quartiles; ///< keyed by LLM method

    const MethodMetric* metric(std::string_view method) const;
    std::string to_json(int indent = 2) const;
    std::string to_table() const;
};

/// Per-method scores aligned with the dataset items; nullopt marks an
/// unscored item.
using MethodScores = std::vector<std::pair<std::string, std::vector<std::optional<double>>>>;
using PairScores = std::vector<std::pair<std::string, std::vector<std::optional<std::pair<double, double>>>>>;

/// Pearson per method against the (difficulty-aligned) truth, dropping
/// unscored items pairwise, plus Steiger tests between every method pair on
/// their common scored items.
EvaluationReport evaluate_ratings(std::string dataset_id, const MethodScores& scores, std::span<const double> truth);

/// Pairwise accuracy per method plus McNemar tests between every method pair.
EvaluationReport evaluate_comparisons(std::string dataset_id, const PairScores& scores,
                                      std::span<const datasets::Simpler> labels);

} // namespace ara::evaluation
