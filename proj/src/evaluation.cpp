#include "ara/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "ara/error.hpp"
#include "json.hpp"

namespace ara::evaluation {

using datasets::Simpler;

double pearson(const VectorRef& x, const VectorRef& y) {
    require(x.size() == y.size(), "pearson needs series of equal length");
    require(x.size() >= 3, "pearson needs at least three points");
    const Eigen::ArrayXd dx = x.array() - x.mean();
    const Eigen::ArrayXd dy = y.array() - y.mean();
    const double sxx = dx.square().sum();
    const double syy = dy.square().sum();
    if (!(sxx > 0.0) || !(syy > 0.0)) raise(ErrorCode::ConstantSeries, "pearson of a constant series");
    const double r = (dx * dy).sum() / std::sqrt(sxx * syy);
    return std::clamp(r, -1.0, 1.0);
}

double pearson(std::span<const double> x, std::span<const double> y) {
    return pearson(Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size())),
                   Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size())));
}

std::vector<bool> pairwise_correctness(std::span<const std::pair<double, double>> predictions,
                                       std::span<const Simpler> labels) {
    require(predictions.size() == labels.size(), "predictions and labels differ in length");
    std::vector<bool> out(predictions.size());
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const auto [a, b] = predictions[i];
        out[i] = labels[i] == Simpler::a ? a < b : b < a;
    }
    return out;
}

PairwiseResult pairwise_accuracy(std::span<const std::pair<double, double>> predictions,
                                 std::span<const Simpler> labels) {
    require(!predictions.empty(), "pairwise accuracy needs at least one pair");
    const auto correct = pairwise_correctness(predictions, labels);
    PairwiseResult r;
    r.n = predictions.size();
    for (std::size_t i = 0; i < r.n; ++i) {
        if (predictions[i].first == predictions[i].second) {
            ++r.ties;
        } else if (correct[i]) {
            ++r.correct;
        } else {
            ++r.wrong;
        }
    }
    r.accuracy = static_cast<double>(r.correct) / static_cast<double>(r.n);
    return r;
}

TestResult steiger_test(double r12, double r13, double r23, std::size_t n) {
    require(n >= 4, "steiger test needs n >= 4");
    for (double r : {r12, r13, r23}) require(r > -1.0 && r < 1.0, "correlations must lie in (-1, 1)");
    const double nn = static_cast<double>(n);
    TestResult out{"steiger", 0.0, 1.0, nn - 3.0};
    if (r12 == r13) return out;

    const double det = 1.0 - r12 * r12 - r13 * r13 - r23 * r23 + 2.0 * r12 * r13 * r23;
    if (det <= 1e-12) {
        raise(ErrorCode::DegenerateCorrelationMatrix, "correlation matrix determinant " + std::to_string(det));
    }
    const double rbar = (r12 + r13) / 2.0;
    const double denom = 2.0 * ((nn - 1.0) / (nn - 3.0)) * det + rbar * rbar * std::pow(1.0 - r23, 3);
    out.statistic = (r12 - r13) * std::sqrt(((nn - 1.0) * (1.0 + r23)) / denom);
    const boost::math::students_t dist(nn - 3.0);
    out.p_value = std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(out.statistic))), 0.0, 1.0);
    return out;
}

TestResult mcnemar(std::size_t b, std::size_t c) {
    const std::size_t n = b + c;
    if (n == 0) return {"mcnemar_exact", 0.0, 1.0, std::nullopt};
    if (n >= 25) {
        const double diff = std::abs(static_cast<double>(b) - static_cast<double>(c)) - 1.0;
        const double chi2 = diff * diff / static_cast<double>(n);
        const boost::math::chi_squared dist(1.0);
        return {"mcnemar_chi2", chi2, std::clamp(boost::math::cdf(boost::math::complement(dist, chi2)), 0.0, 1.0), 1.0};
    }
    // Below 25 trials every term is an integer over 2^n, so this sum is exact.
    const std::size_t k = std::min(b, c);
    std::uint64_t coeff = 1;
    std::uint64_t tail = 0;
    for (std::size_t i = 0; i <= k; ++i) {
        if (i > 0) coeff = coeff * (n - i + 1) / i;
        tail += coeff;
    }
    const double p = std::min(1.0, 2.0 * static_cast<double>(tail) / std::ldexp(1.0, static_cast<int>(n)));
    return {"mcnemar_exact", static_cast<double>(k), p, std::nullopt};
}

double percentile(std::span<const double> values, double q) {
    require(!values.empty(), "percentile of an empty list");
    require(q >= 0.0 && q <= 1.0, "percentile rank must lie in [0, 1]");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double h = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

namespace {

GroupCorrelation group_correlation(const std::vector<double>& x, const std::vector<double>& y) {
    GroupCorrelation g;
    g.n = x.size();
    try {
        g.r = pearson(std::span<const double>(x), std::span<const double>(y));
    } catch (const Error& e) {
        g.error = e.what();
    }
    return g;
}

} // namespace

QuartileAnalysis confidence_quartile_analysis(std::span<const double> scores, std::span<const double> confidences,
                                              std::span<const double> truth) {
    require(scores.size() == confidences.size() && scores.size() == truth.size(),
            "quartile analysis needs lists of equal length");
    require(scores.size() >= 12, "quartile analysis needs at least 12 items");
    QuartileAnalysis q;
    q.p25 = percentile(confidences, 0.25);
    q.p75 = percentile(confidences, 0.75);
    std::vector<double> top_s, top_t, bottom_s, bottom_t;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (confidences[i] >= q.p75) {
            top_s.push_back(scores[i]);
            top_t.push_back(truth[i]);
        }
        if (confidences[i] <= q.p25) {
            bottom_s.push_back(scores[i]);
            bottom_t.push_back(truth[i]);
        }
    }
    q.top = group_correlation(top_s, top_t);
    q.bottom = group_correlation(bottom_s, bottom_t);
    if (q.top.r && q.bottom.r) q.gap = *q.top.r - *q.bottom.r;
    return q;
}

// -------------------------------------------------------------- reports

EvaluationReport evaluate_ratings(std::string dataset_id, const MethodScores& scores, std::span<const double> truth) {
    EvaluationReport report;
    report.dataset_id = std::move(dataset_id);
    report.kind = datasets::DatasetKind::rating;
    report.items = truth.size();
    for (const auto& [method, values] : scores) {
        require(values.size() == truth.size(), "method '" + method + "' scores differ in length from the truth");
        MethodMetric m{method, "pearson", std::nullopt, 0, 0, std::nullopt, std::nullopt};
        std::vector<double> x, y;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (values[i]) {
                x.push_back(*values[i]);
                y.push_back(truth[i]);
            }
        }
        m.scored = x.size();
        m.unscored = values.size() - x.size();
        try {
            m.value = pearson(std::span<const double>(x), std::span<const double>(y));
        } catch (const Error& e) {
            m.error = e.what();
        }
        report.metrics.push_back(std::move(m));
    }
    for (std::size_t a = 0; a < scores.size(); ++a) {
        for (std::size_t b = a + 1; b < scores.size(); ++b) {
            PairwiseTest t;
            t.method_a = scores[a].first;
            t.method_b = scores[b].first;
            std::vector<double> xa, xb, y;
            for (std::size_t i = 0; i < truth.size(); ++i) {
                if (scores[a].second[i] && scores[b].second[i]) {
                    xa.push_back(*scores[a].second[i]);
                    xb.push_back(*scores[b].second[i]);
                    y.push_back(truth[i]);
                }
            }
            t.n = y.size();
            try {
                const double r12 = pearson(std::span<const double>(xa), std::span<const double>(y));
                const double r13 = pearson(std::span<const double>(xb), std::span<const double>(y));
                const double r23 = pearson(std::span<const double>(xa), std::span<const double>(xb));
                t.result = steiger_test(r12, r13, r23, t.n);
            } catch (const Error& e) {
                t.result = {"steiger", 0.0, 1.0, std::nullopt};
                t.error = e.what();
            }
            report.tests.push_back(std::move(t));
        }
    }
    return report;
}

EvaluationReport evaluate_comparisons(std::string dataset_id, const PairScores& scores,
                                      std::span<const Simpler> labels) {
    EvaluationReport report;
    report.dataset_id = std::move(dataset_id);
    report.kind = datasets::DatasetKind::comparison;
    report.items = labels.size();
    for (const auto& [method, values] : scores) {
        require(values.size() == labels.size(), "method '" + method + "' scores differ in length from the labels");
        MethodMetric m{method, "pairwise_accuracy", std::nullopt, 0, 0, std::nullopt, std::nullopt};
        std::vector<std::pair<double, double>> preds;
        std::vector<Simpler> kept;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (values[i]) {
                preds.push_back(*values[i]);
                kept.push_back(labels[i]);
            }
        }
        m.scored = preds.size();
        m.unscored = values.size() - preds.size();
        if (preds.empty()) {
            m.error = "no scored pairs";
        } else {
            const auto r = pairwise_accuracy(preds, kept);
            m.value = r.accuracy;
            m.ties = r.ties;
        }
        report.metrics.push_back(std::move(m));
    }
    for (std::size_t a = 0; a < scores.size(); ++a) {
        for (std::size_t b = a + 1; b < scores.size(); ++b) {
            PairwiseTest t;
            t.method_a = scores[a].first;
            t.method_b = scores[b].first;
            std::size_t only_a = 0, only_b = 0;
            for (std::size_t i = 0; i < labels.size(); ++i) {
                const auto& pa = scores[a].second[i];
                const auto& pb = scores[b].second[i];
                if (!pa || !pb) continue;
                ++t.n;
                const bool ca = labels[i] == Simpler::a ? pa->first < pa->second : pa->second < pa->first;
                const bool cb = labels[i] == Simpler::a ? pb->first < pb->second : pb->second < pb->first;
                only_a += ca && !cb;
                only_b += cb && !ca;
            }
            t.result = mcnemar(only_a, only_b);
            report.tests.push_back(std::move(t));
        }
    }
    return report;
}

const MethodMetric* EvaluationReport::metric(std::string_view method) const {
    for (const auto& m : metrics) {
        if (m.method == method) return &m;
    }
    return nullptr;
}

namespace {

using nlohmann::ordered_json;

template <typename T>
ordered_json opt(const std::optional<T>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json group_json(const GroupCorrelation& g) {
    return {{"r", opt(g.r)}, {"n", g.n}, {"error", opt(g.error)}};
}

std::string fmt(const std::optional<double>& v, int precision = 4) {
    if (!v) return "-";
    std::ostringstream out;
    out << std::fixed << std::setprecision(precision) << *v;
    return out.str();
}

} // namespace

std::string EvaluationReport::to_json(int indent) const {
    ordered_json doc;
    doc["dataset_id"] = dataset_id;
    doc["kind"] = std::string(datasets::to_string(kind));
    doc["items"] = items;
    auto& ms = doc["metrics"] = ordered_json::array();
    for (const auto& m : metrics) {
        ms.push_back({{"method", m.method},
                      {"metric", m.metric},
                      {"value", opt(m.value)},
                      {"scored", m.scored},
                      {"unscored", m.unscored},
                      {"ties", opt(m.ties)},
                      {"error", opt(m.error)}});
    }
    auto& ts = doc["tests"] = ordered_json::array();
    for (const auto& t : tests) {
        ts.push_back({{"method_a", t.method_a},
                      {"method_b", t.method_b},
                      {"test", t.result.test},
                      {"n", t.n},
                      {"statistic", t.result.statistic},
                      {"p_value", t.result.p_value},
                      {"df", opt(t.result.df)},
                      {"error", opt(t.error)}});
    }
    auto& qs = doc["quartiles"] = ordered_json::object();
    for (const auto& [method, q] : quartiles) {
        qs[method] = {{"p25", q.p25}, {"p75", q.p75}, {"top", group_json(q.top)}, {"bottom", group_json(q.bottom)},
                      {"gap", opt(q.gap)}};
    }
    return doc.dump(indent);
}

std::string EvaluationReport::to_table() const {
    std::ostringstream out;
    out << "dataset " << dataset_id << " (" << datasets::to_string(kind) << ", " << items << " items)\n";
    out << std::left << std::setw(22) << "method" << std::setw(19) << "metric" << std::setw(10) << "value"
        << std::setw(8) << "scored" << std::setw(10) << "unscored" << "ties\n";
    for (const auto& m : metrics) {
        out << std::setw(22) << m.method << std::setw(19) << m.metric << std::setw(10) << fmt(m.value)
            << std::setw(8) << m.scored << std::setw(10) << m.unscored
            << (m.ties ? std::to_string(*m.ties) : std::string("-"));
        if (m.error) out << "  [" << *m.error << "]";
        out << '\n';
    }
    if (!tests.empty()) {
        out << '\n' << std::setw(44) << "comparison" << std::setw(15) << "test" << std::setw(11) << "statistic"
            << "p\n";
        for (const auto& t : tests) {
            out << std::setw(44) << (t.method_a + " vs " + t.method_b) << std::setw(15) << t.result.test
                << std::setw(11) << fmt(t.result.statistic) << fmt(t.result.p_value);
            if (t.error) out << "  [" << *t.error << "]";
            out << '\n';
        }
    }
    for (const auto& [method, q] : quartiles) {
        out << '\n' << "confidence quartiles for " << method << ": top r " << fmt(q.top.r) << " (n " << q.top.n
            << "), bottom r " << fmt(q.bottom.r) << " (n " << q.bottom.n << "), gap " << fmt(q.gap) << '\n';
    }
    return out.str();
}

} // namespace ara::evaluation
