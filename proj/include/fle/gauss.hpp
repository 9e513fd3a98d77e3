#pragma once

#include "fle/error.hpp"

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

namespace fle {

/// Gauss-Legendre nodes and weights on [-1, 1], ascending nodes.
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Newton iteration on the three-term Legendre recurrence, started from the
/// Tricomi asymptotic guess. Accurate to a few ulps for n up to several hundred.
inline GaussLegendre gauss_legendre(int n)
{
    if (n < 1)
        throw Error(Errc::InvalidArgument, "Gauss-Legendre order must be >= 1");
    GaussLegendre g;
    g.nodes.assign(n, 0.0);
    g.weights.assign(n, 2.0);
    if (n == 1)
        return g;

    // P_n(x) and P_n'(x)
    auto legendre = [n](double x) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        return std::pair{p1, n * (x * p1 - p0) / (x * x - 1.0)};
    };

    for (int i = 0; i < n / 2; ++i) {
        const double th = std::numbers::pi * (i + 0.75) / (n + 0.5);
        double x = std::cos(th) * (1.0 - (n - 1.0) / (8.0 * n * n * n));
        for (int it = 0; it < 100; ++it) {
            const auto [p, dp] = legendre(x);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) <= 1e-16)
                break;
        }
        const double dp = legendre(x).second;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        g.nodes[n - 1 - i] = x;
        g.nodes[i] = -x;
        g.weights[n - 1 - i] = w;
        g.weights[i] = w;
    }
    if (n % 2 == 1) {
        const double dp = legendre(0.0).second;
        g.weights[n / 2] = 2.0 / (dp * dp);
    }
    return g;
}

/// Pairwise summation in a fixed order, so results do not depend on how a
/// caller chunks the work.
inline double pairwise_sum(const double* v, std::size_t n)
{
    if (n <= 16) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            acc += v[i];
        return acc;
    }
    const std::size_t m = n / 2;
    return pairwise_sum(v, m) + pairwise_sum(v + m, n - m);
}

inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

} // namespace fle
