#pragma once

// Composite Gauss-Legendre rules graded geometrically toward the origin, for
// integrands f(x)|x|^{-gamma} with f smooth and gamma below the design strength.

#include "fle/domain.hpp"
#include "fle/error.hpp"
#include "fle/gauss.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace fle {

struct GradedRuleSpec {
    double gamma = 0.0;      ///< design singularity strength; the rule serves every gamma' <= gamma
    int panels = 32;         ///< geometric panels per half axis; innermost width grading^{-panels}
    int order = 10;          ///< Gauss points per regular panel
    double grading = 2.0;    ///< geometric ratio between neighbouring panels
    double max_width = 0.0;  ///< if > 0, panels wider than this are split uniformly
};

struct QuadratureRule {
    Domain domain;
    std::vector<Point> nodes;
    std::vector<double> weights;
    std::vector<double> radii; ///< |x_i|, cached; never zero
    GradedRuleSpec spec;

    std::size_t size() const noexcept { return weights.size(); }

    /// w_i |x_i|^{-gamma}
    std::vector<double> weighted(double gamma) const;
};

namespace detail {

struct Node1 {
    double x;
    double w;
};

inline void append_panel(std::vector<Node1>& out, const GaussLegendre& g, double a, double b)
{
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        out.push_back({c + h * g.nodes[i], h * g.weights[i]});
}

/// Rule on (0, 1] graded toward 0. The innermost panel [0, eps] is integrated
/// after the substitution x = eps tau^m, which turns x^{-gamma} dx into the
/// smooth density m eps^{1-gamma} tau^{m(1-gamma)-1} dtau. Nodes that underflow
/// are dropped; their weight is below the smallest normal double.
inline std::vector<Node1> graded_unit_rule(double gamma, int panels, int order, double grading,
                                           double max_width, std::size_t* inner_count = nullptr)
{
    std::vector<Node1> out;
    const double eps = std::pow(grading, -panels);

    const double strength = std::min(gamma, 0.999);
    int m = static_cast<int>(std::ceil((2.0 * order + 1.0) / (1.0 - strength)));
    m = std::clamp(m, 2, 200);
    const int n_inner = std::max(order, m);
    const GaussLegendre gi = gauss_legendre(n_inner);
    for (int i = 0; i < n_inner; ++i) {
        const double tau = 0.5 * (gi.nodes[i] + 1.0);
        const double x = eps * std::pow(tau, m);
        const double w = 0.5 * gi.weights[i] * eps * m * std::pow(tau, m - 1);
        if (x > 1e-300 && w > 0.0)
            out.push_back({x, w});
    }
    if (inner_count)
        *inner_count = out.size();

    const GaussLegendre g = gauss_legendre(order);
    for (int j = panels - 1; j >= 0; --j) {
        const double a = std::pow(grading, -(j + 1));
        const double b = std::pow(grading, -j);
        int pieces = 1;
        if (max_width > 0.0)
            pieces = std::max(1, static_cast<int>(std::ceil((b - a) / max_width - 1e-12)));
        for (int k = 0; k < pieces; ++k)
            append_panel(out, g, a + (b - a) * k / pieces, a + (b - a) * (k + 1) / pieces);
    }
    return out;
}

/// Power-substituted rule on (0, 1] for u^{-gamma} du.
inline std::vector<Node1> substituted_unit_rule(double gamma, int order)
{
    const double strength = std::min(gamma, 0.999);
    int m = static_cast<int>(std::ceil((2.0 * order + 1.0) / (1.0 - strength)));
    m = std::clamp(m, 1, 200);
    const int n = std::max(order, m);
    const GaussLegendre g = gauss_legendre(n);
    std::vector<Node1> out;
    for (int i = 0; i < n; ++i) {
        const double tau = 0.5 * (g.nodes[i] + 1.0);
        const double x = std::pow(tau, m);
        const double w = 0.5 * g.weights[i] * m * std::pow(tau, m - 1);
        if (x > 1e-300 && w > 0.0)
            out.push_back({x, w});
    }
    return out;
}

} // namespace detail

/// Builds the graded rule on the interval (-1,1) or the square (-1,1)^2. The
/// square is split into four quadrants, each a tensor product of the 1D graded
/// rule pointing at the origin corner.
inline QuadratureRule build_graded_rule(const Domain& domain, const GradedRuleSpec& spec)
{
    const int N = domain.dim();
    if (!(spec.gamma < N))
        throw Error(Errc::WeightNotIntegrable, "rule design exponent must satisfy gamma < N");
    if (spec.panels < 2 || spec.order < 2)
        throw Error(Errc::InvalidArgument, "need panels >= 2 and order >= 2");
    if (!(spec.grading > 1.0))
        throw Error(Errc::InvalidArgument, "grading ratio must exceed 1");
    if (!(spec.max_width >= 0.0))
        throw Error(Errc::InvalidArgument, "max_width must be nonnegative");

    // Off the corner cell the 2D integrand is smooth in each variable, so the
    // axis rules only need the 1D design for a bounded weight.
    std::size_t n_inner = 0;
    const double axis_gamma = N == 1 ? spec.gamma : 0.0;
    const auto half = detail::graded_unit_rule(axis_gamma, spec.panels, spec.order, spec.grading,
                                               spec.max_width, &n_inner);

    QuadratureRule rule;
    rule.domain = domain;
    rule.spec = spec;
    if (N == 1) {
        const std::size_t n = half.size();
        rule.nodes.reserve(2 * n);
        rule.weights.reserve(2 * n);
        for (std::size_t i = n; i-- > 0;) {
            rule.nodes.push_back({-half[i].x, 0.0});
            rule.weights.push_back(half[i].w);
        }
        for (std::size_t i = 0; i < n; ++i) {
            rule.nodes.push_back({half[i].x, 0.0});
            rule.weights.push_back(half[i].w);
        }
    } else {
        // Corner cell [0,eps]^2 by the Duffy map x = eps u, y = eps u v (and its
        // mirror), which gives r^{-gamma} dx dy = eps^{2-gamma} u^{1-gamma} (1+v^2)^{-gamma/2} du dv.
        const double eps = std::pow(spec.grading, -spec.panels);
        const auto ru = detail::substituted_unit_rule(spec.gamma - 1.0, spec.order);
        const GaussLegendre gv = gauss_legendre(std::max(spec.order, 8));
        std::vector<double> corner_x, corner_y, corner_w;
        for (const auto& u : ru)
            for (std::size_t j = 0; j < gv.nodes.size(); ++j) {
                const double v = 0.5 * (gv.nodes[j] + 1.0);
                const double wv = 0.5 * gv.weights[j];
                corner_x.push_back(eps * u.x);
                corner_y.push_back(eps * u.x * v);
                corner_w.push_back(eps * eps * u.w * u.x * wv);
            }

        const double sign[2] = {-1.0, 1.0};
        for (double sx : sign)
            for (double sy : sign) {
                for (std::size_t i = 0; i < half.size(); ++i)
                    for (std::size_t j = 0; j < half.size(); ++j) {
                        if (i < n_inner && j < n_inner)
                            continue;
                        rule.nodes.push_back({sx * half[i].x, sy * half[j].x});
                        rule.weights.push_back(half[i].w * half[j].w);
                    }
                for (std::size_t k = 0; k < corner_w.size(); ++k) {
                    rule.nodes.push_back({sx * corner_x[k], sy * corner_y[k]});
                    rule.weights.push_back(corner_w[k]);
                    rule.nodes.push_back({sx * corner_y[k], sy * corner_x[k]});
                    rule.weights.push_back(corner_w[k]);
                }
            }
    }
    rule.radii.reserve(rule.nodes.size());
    for (const auto& pt : rule.nodes)
        rule.radii.push_back(domain.radius(pt));
    return rule;
}

inline QuadratureRule build_graded_rule(const Domain& domain, double gamma, int panels, int order,
                                        double grading = 2.0)
{
    GradedRuleSpec spec;
    spec.gamma = gamma;
    spec.panels = panels;
    spec.order = order;
    spec.grading = grading;
    return build_graded_rule(domain, spec);
}

inline std::vector<double> QuadratureRule::weighted(double gamma) const
{
    if (!(gamma < domain.dim()))
        throw Error(Errc::WeightNotIntegrable, "weight |x|^{-gamma} needs gamma < N");
    if (gamma > spec.gamma + 1e-14)
        throw Error(Errc::RuleMismatch, "rule was built for a weaker singularity");
    std::vector<double> out(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i)
        out[i] = gamma == 0.0 ? weights[i] : weights[i] * std::pow(radii[i], -gamma);
    return out;
}

/// Sum of w_i f_i |x_i|^{-gamma}, with f given at the rule nodes.
inline double integrate_weighted(const std::vector<double>& f, double gamma, const QuadratureRule& rule)
{
    if (f.size() != rule.size())
        throw Error(Errc::RuleMismatch, "value count does not match rule size");
    std::vector<double> terms = rule.weighted(gamma);
    for (std::size_t i = 0; i < terms.size(); ++i)
        terms[i] *= f[i];
    return pairwise_sum(terms);
}

inline double integrate_weighted(const std::function<double(const Point&)>& f, double gamma,
                                 const QuadratureRule& rule)
{
    std::vector<double> vals(rule.size());
    for (std::size_t i = 0; i < vals.size(); ++i)
        vals[i] = f(rule.nodes[i]);
    return integrate_weighted(vals, gamma, rule);
}

} // namespace fle
