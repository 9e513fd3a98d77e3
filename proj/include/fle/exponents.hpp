#pragma once

// Exponent algebra for the weighted system  L u = v^p/|x|^alpha,  L v = u^q/|x|^beta:
// critical hyperbole, asymptotes, intersection with pq = 1, superlinearity and
// the admissible range of the auxiliary space index t.

#include "fle/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace fle {

struct ProblemParams {
    int N = 1;          ///< space dimension, 1 or 2
    double s = 0.25;    ///< fractional order, 0 < s < 1
    double alpha = 0.0; ///< weight exponent on the v-equation
    double beta = 0.0;  ///< weight exponent on the u-equation

    /// Structural validity: N in {1,2}, 0 < s < 1, N - 2s > 0.
    bool structurally_valid() const noexcept
    {
        return (N == 1 || N == 2) && s > 0.0 && s < 1.0 && N - 2.0 * s > 0.0
            && std::isfinite(alpha) && std::isfinite(beta);
    }
    bool weights_integrable() const noexcept { return alpha < N && beta < N; }

    void validate() const
    {
        if (!structurally_valid())
            throw Error(Errc::InvalidArgument,
                "need N in {1,2}, 0<s<1 and N-2s>0 (N=" + std::to_string(N)
                    + ", s=" + std::to_string(s) + ")");
        if (!weights_integrable())
            throw Error(Errc::WeightNotIntegrable, "need alpha < N and beta < N");
    }
};

struct ExponentPair {
    double p = 2.0; ///< power on v
    double q = 2.0; ///< power on u

    bool valid() const noexcept { return p > 0.0 && q > 0.0 && std::isfinite(p) && std::isfinite(q); }
    void validate() const
    {
        if (!valid())
            throw Error(Errc::InvalidArgument, "exponents must satisfy p > 0, q > 0");
    }
    ExponentPair scaled(double theta) const { return {theta * p, theta * q}; }
};

/// Open interval (lo, hi); empty iff lo >= hi.
struct TInterval {
    double lo = 0.0;
    double hi = 0.0;

    bool empty() const noexcept { return !(lo < hi); }
    bool contains(double t) const noexcept { return !empty() && t > lo && t < hi; }
    double midpoint() const noexcept { return 0.5 * (lo + hi); }
};

/// (N-alpha)/(p+1) + (N-beta)/(q+1) - (N-2s). Positive means strictly below the
/// critical hyperbole.
inline double hyperbole_gap(const ProblemParams& P, const ExponentPair& e) noexcept
{
    return (P.N - P.alpha) / (e.p + 1.0) + (P.N - P.beta) / (e.q + 1.0) - (P.N - 2.0 * P.s);
}

struct Asymptotes {
    double p_vertical;
    double q_horizontal;
};

inline Asymptotes asymptotes(const ProblemParams& P) noexcept
{
    const double d = P.N - 2.0 * P.s;
    return {(2.0 * P.s - P.alpha) / d, (2.0 * P.s - P.beta) / d};
}

/// q on the critical hyperbole for a given p; empty unless p lies strictly to the
/// right of the vertical asymptote.
inline std::optional<double> critical_q_of_p(const ProblemParams& P, double p) noexcept
{
    const double rest = (P.N - 2.0 * P.s) - (P.N - P.alpha) / (p + 1.0);
    if (!(rest > 0.0))
        return std::nullopt;
    return (P.N - P.beta) / rest - 1.0;
}

struct PqPoint {
    double p;
    double q;
};

/// Both roots of the closed-form intersection expression
///   q = (-(alpha+beta-4s) +- |alpha-beta|) / (2 alpha - 4s).
/// One root is always the spurious q = -1 (it solves the cleared equation but not
/// pq = 1 with p > 0); it is kept here only so callers can audit it.
inline std::array<double, 2> intersection_formula_roots(const ProblemParams& P)
{
    const double den = 2.0 * P.alpha - 4.0 * P.s;
    if (den == 0.0)
        throw Error(Errc::DegenerateWeight, "alpha = 2s: no finite intersection with pq = 1");
    const double base = -(P.alpha + P.beta - 4.0 * P.s);
    const double dev = std::abs(P.alpha - P.beta);
    return {(base + dev) / den, (base - dev) / den};
}

/// True when a formula root is the spurious branch (q = -1).
inline bool is_spurious_root(double q) noexcept { return std::abs(q + 1.0) <= 1e-12; }

/// First-quadrant intersection of the critical hyperbole with pq = 1:
/// q* = (beta - 2s)/(2s - alpha), p* = 1/q*, reported only when q* > 0.
inline std::optional<PqPoint> pq1_intersection(const ProblemParams& P)
{
    const double den = 2.0 * P.s - P.alpha;
    if (den == 0.0)
        throw Error(Errc::DegenerateWeight, "alpha = 2s: no finite intersection with pq = 1");
    const double q = (P.beta - 2.0 * P.s) / den;
    if (!(q > 0.0))
        return std::nullopt;
    return PqPoint{1.0 / q, q};
}

/// 1 > 1/(p+1) + 1/(q+1), which is algebraically pq > 1.
inline bool is_superlinear(const ExponentPair& e) noexcept
{
    return 1.0 > 1.0 / (e.p + 1.0) + 1.0 / (e.q + 1.0);
}

inline double superlinear_margin(const ExponentPair& e) noexcept
{
    return 1.0 - 1.0 / (e.p + 1.0) - 1.0 / (e.q + 1.0);
}

/// Range of t for which the product space Theta^t x Theta^{2s-t} embeds compactly
/// into the weighted Lebesgue spaces of the nonlinearity.
inline TInterval admissible_t_interval(const ProblemParams& P, const ExponentPair& e) noexcept
{
    const double N = P.N;
    const double s2 = 2.0 * P.s;
    if (s2 < N && N < 2.0 * s2)
        return {N / 2.0, s2};
    if (!(N >= 2.0 * s2))
        return {0.0, 0.0}; // N <= 2s: outside the problem class
    const double lo = (N - 2.0 * (N - P.beta) / (e.q + 1.0)) / 2.0;
    const double hi = (2.0 * (N - P.alpha) / (e.p + 1.0) - N + 2.0 * s2) / 2.0;
    return {std::max(0.0, lo), std::min(s2, hi)};
}

struct AdmissibilityCondition {
    std::string name;
    bool pass;
    double margin; ///< signed slack; positive when the strict inequality holds
};

struct AdmissibilityReport {
    ProblemParams params;
    ExponentPair pair;
    double t = 0.0;
    TInterval t_range;
    double gap = 0.0;
    std::vector<AdmissibilityCondition> conditions;

    bool admissible() const noexcept
    {
        for (const auto& c : conditions)
            if (!c.pass)
                return false;
        return true;
    }

    std::vector<std::string> failed() const
    {
        std::vector<std::string> out;
        for (const auto& c : conditions)
            if (!c.pass)
                out.push_back(c.name);
        return out;
    }

    const AdmissibilityCondition* find(const std::string& name) const noexcept
    {
        for (const auto& c : conditions)
            if (c.name == name)
                return &c;
        return nullptr;
    }
};

/// Evaluates every hypothesis of the existence result. Never throws; failures
/// are entries of the report. All inequalities are strict, so boundary cases
/// (gap = 0, pq = 1, t on an endpoint) are not admissible.
inline AdmissibilityReport check_problem(const ProblemParams& P, const ExponentPair& e, double t)
{
    AdmissibilityReport r;
    r.params = P;
    r.pair = e;
    r.t = t;

    const bool structural = P.structurally_valid();
    r.conditions.push_back({"params_valid", structural, structural ? P.N - 2.0 * P.s : -1.0});
    r.conditions.push_back({"exponents_positive", e.valid(), std::min(e.p, e.q)});
    r.conditions.push_back({"alpha_lt_N", P.alpha < P.N, P.N - P.alpha});
    r.conditions.push_back({"beta_lt_N", P.beta < P.N, P.N - P.beta});

    r.gap = hyperbole_gap(P, e);
    r.conditions.push_back({"subcritical", r.gap > 0.0, r.gap});

    const double sm = superlinear_margin(e);
    r.conditions.push_back({"superlinear", is_superlinear(e), sm});

    r.t_range = structural ? admissible_t_interval(P, e) : TInterval{0.0, 0.0};
    const double tm = std::min(t - r.t_range.lo, r.t_range.hi - t);
    r.conditions.push_back({"t_admissible", r.t_range.contains(t), tm});
    return r;
}

} // namespace fle
