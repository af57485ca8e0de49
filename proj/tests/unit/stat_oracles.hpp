#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <cstdint>
#include <random>
#include <tuple>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

namespace ara::test {

struct SteigerOracle {
    double t;
    double p;
};

/// Straight-line transcription of Steiger's modification of Williams's T2:
/// t = (r12 - r13) * sqrt((n - 1)(1 + r23) / (2 (n - 1)/(n - 3) |R| + rbar^2 (1 - r23)^3))
/// with |R| the determinant of the 3x3 correlation matrix and rbar the mean
/// of r12 and r13. The two-sided p comes from the regularized incomplete
/// beta function: P(|T| > t) = I_{df/(df+t^2)}(df/2, 1/2).
inline SteigerOracle steiger_oracle(double r12, double r13, double r23, double n) {
    const double m[3][3] = {{1.0, r12, r13}, {r12, 1.0, r23}, {r13, r23, 1.0}};
    const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                       m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                       m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    const double rbar = 0.5 * (r12 + r13);
    const double num = (n - 1.0) * (1.0 + r23);
    const double den = 2.0 * (n - 1.0) / (n - 3.0) * det + rbar * rbar * (1.0 - r23) * (1.0 - r23) * (1.0 - r23);
    const double t = (r12 - r13) * std::sqrt(num / den);
    const double df = n - 3.0;
    const double p = boost::math::ibeta(df / 2.0, 0.5, df / (df + t * t));
    return {t, p};
}

/// Random (r12, r13, r23, n) whose correlation matrix is comfortably
/// positive definite.
template <typename Rng>
std::tuple<double, double, double, std::size_t> random_steiger_input(Rng& rng) {
    std::uniform_real_distribution<double> r(-0.9, 0.9);
    std::uniform_int_distribution<std::size_t> n(10, 2000);
    while (true) {
        const double a = r(rng), b = r(rng), c = r(rng);
        const double det = 1 - a * a - b * b - c * c + 2 * a * b * c;
        if (det > 0.05 && a != b) return {a, b, c, n(rng)};
    }
}

inline double direct_pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

/// Scores whose in-sample correlation with `truth` is exactly `r` up to
/// rounding: Gaussian noise with its projection on the truth removed,
/// rescaled and mixed with the standardized truth.
template <typename Rng>
std::vector<double> scores_with_correlation(const std::vector<double>& truth, double r, Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    const std::size_t n = truth.size();
    const double mt = std::accumulate(truth.begin(), truth.end(), 0.0) / static_cast<double>(n);
    std::vector<double> z(n), e(n);
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) ss += (truth[i] - mt) * (truth[i] - mt);
    for (std::size_t i = 0; i < n; ++i) z[i] = (truth[i] - mt) / std::sqrt(ss);
    double me = 0;
    for (auto& v : e) me += (v = g(rng));
    me /= static_cast<double>(n);
    double dot = 0;
    for (std::size_t i = 0; i < n; ++i) dot += (e[i] -= me) * z[i];
    double ee = 0;
    for (std::size_t i = 0; i < n; ++i) ee += (e[i] -= dot * z[i]) * e[i];
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = 3.0 + r * z[i] + std::sqrt(1 - r * r) * e[i] / std::sqrt(ee);
    return s;
}

struct QuartileFixture {
    std::vector<double> scores;
    std::vector<double> confidences;
    std::vector<double> truth;
    std::vector<std::size_t> top;    ///< indices with the highest quarter of confidences
    std::vector<std::size_t> bottom; ///< indices with the lowest quarter
};

/// 4 * per_group items with distinct confidences. The top confidence quarter
/// has score/truth correlation r_top, the bottom quarter r_bottom, and the
/// middle half r = 0.6.
inline QuartileFixture quartile_fixture(std::uint64_t seed, std::size_t per_group, double r_top, double r_bottom) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    const std::size_t n = 4 * per_group;
    QuartileFixture f;
    f.scores.resize(n);
    f.confidences.resize(n);
    f.truth.resize(n);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    // order[k] receives the k-th smallest confidence.
    for (std::size_t k = 0; k < n; ++k) f.confidences[order[k]] = 0.1 + 0.8 * static_cast<double>(k) / static_cast<double>(n - 1);

    auto fill = [&](std::size_t from, std::size_t to, double r, std::vector<std::size_t>* group) {
        std::vector<double> t;
        for (std::size_t k = from; k < to; ++k) t.push_back(3.0 + g(rng));
        const auto s = scores_with_correlation(t, r, rng);
        for (std::size_t k = from; k < to; ++k) {
            f.truth[order[k]] = t[k - from];
            f.scores[order[k]] = s[k - from];
            if (group) group->push_back(order[k]);
        }
    };
    fill(0, per_group, r_bottom, &f.bottom);
    fill(per_group, 3 * per_group, 0.6, nullptr);
    fill(3 * per_group, n, r_top, &f.top);
    return f;
}

} // namespace ara::test
