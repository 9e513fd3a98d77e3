#pragma once

// Exponent arithmetic of the Brezis-Kato bootstrap: integrability ranges of the
// coefficient functions, the four-step chain that raises the Lebesgue exponent
// of a solution, and the Hoelder-regularity trigger.

#include "fle/basis.hpp"
#include "fle/error.hpp"
#include "fle/exponents.hpp"
#include "fle/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace fle {

inline constexpr double kCoefficientShrink = 0.99; ///< c, d taken as 0.99 of their open-range suprema

enum class CoefficientBranch { BothAtLeastOne, BothBelowOne, PBelowOne, QBelowOne };

inline std::string to_string(CoefficientBranch b)
{
    switch (b) {
    case CoefficientBranch::BothAtLeastOne: return "p,q>=1";
    case CoefficientBranch::BothBelowOne: return "p,q<1";
    case CoefficientBranch::PBelowOne: return "p<1<=q";
    case CoefficientBranch::QBelowOne: return "q<1<=p";
    }
    return "unknown";
}

/// Powers with which the chain sees the iterate: the coefficient written as
/// w^{e-1} (e >= 1) gives power 1, the one written as w^{e/2} (e < 1) gives e/2.
struct ChainPowers {
    double rho_a = 1.0; ///< applied to the v-side exponent (from p)
    double rho_b = 1.0; ///< applied to the u-side exponent (from q)
};

struct CoefficientRanges {
    double c_sup = 0.0; ///< a(x) in L^c for c < c_sup
    double d_sup = 0.0; ///< b(x) in L^d for d < d_sup
    bool c_unbounded = false;
    bool d_unbounded = false;
    CoefficientBranch branch = CoefficientBranch::BothAtLeastOne;
    ChainPowers powers;
};

namespace detail {

/// num/den, or +inf with the flag set when den <= 0.
inline double sup_or_unbounded(double num, double den, bool& unbounded)
{
    unbounded = !(den > 0.0);
    return unbounded ? std::numeric_limits<double>::infinity() : num / den;
}

} // namespace detail

/// For e >= 1 the coefficient is w^{e-1}|x|^{-weight}, giving 2N/((e-1)L + 2 weight);
/// for e < 1 it is w^{e/2}|x|^{-weight}, giving 4N/(e L + 4 weight). L is
/// N-(4s-2t) on the v side and N-2t on the u side.
inline CoefficientRanges coefficient_exponent_ranges(const ProblemParams& P, const ExponentPair& e, double t)
{
    const double N = P.N;
    const double Lv = N - (4.0 * P.s - 2.0 * t);
    const double Lu = N - 2.0 * t;
    CoefficientRanges r;
    if (e.p >= 1.0) {
        r.c_sup = detail::sup_or_unbounded(2.0 * N, (e.p - 1.0) * Lv + 2.0 * P.alpha, r.c_unbounded);
        r.powers.rho_a = 1.0;
    } else {
        r.c_sup = detail::sup_or_unbounded(4.0 * N, e.p * Lv + 4.0 * P.alpha, r.c_unbounded);
        r.powers.rho_a = e.p / 2.0;
    }
    if (e.q >= 1.0) {
        r.d_sup = detail::sup_or_unbounded(2.0 * N, (e.q - 1.0) * Lu + 2.0 * P.beta, r.d_unbounded);
        r.powers.rho_b = 1.0;
    } else {
        r.d_sup = detail::sup_or_unbounded(4.0 * N, e.q * Lu + 4.0 * P.beta, r.d_unbounded);
        r.powers.rho_b = e.q / 2.0;
    }
    if (e.p >= 1.0 && e.q >= 1.0)
        r.branch = CoefficientBranch::BothAtLeastOne;
    else if (e.p < 1.0 && e.q < 1.0)
        r.branch = CoefficientBranch::BothBelowOne;
    else
        r.branch = e.p < 1.0 ? CoefficientBranch::PBelowOne : CoefficientBranch::QBelowOne;
    return r;
}

struct StepRecord {
    double gamma = 0.0;
    double tau = 0.0;
    double theta = 0.0;
    double eta = 0.0;
    double delta = 0.0; ///< +inf on the step that reaches L^infinity
};

struct StepOutcome {
    StepRecord record;
    bool linfinity = false;
};

/// One pass of the chain with general powers:
///   1/tau = 1/d + rho_b/gamma, 1/theta = rho_a (1/tau - 2s/N), 1/eta = 1/c + 1/theta,
///   L^infinity when 1/eta <= 2s/N, else 1/delta = 1/eta - 2s/N.
/// Infinite c or d contribute zero reciprocals. When 1/tau <= 2s/N the Sobolev
/// step already lands in L^infinity and theta is +inf.
inline StepOutcome chain_step(double gamma, double d, double c, const ChainPowers& pw, int N, double s)
{
    if (!(gamma > 1.0 && d > 1.0 && c > 1.0))
        throw Error(Errc::InvalidArgument, "chain exponents must exceed 1");
    if (!(pw.rho_a > 0.0 && pw.rho_b > 0.0 && std::isfinite(pw.rho_a) && std::isfinite(pw.rho_b)))
        throw Error(Errc::InvalidChain, "chain powers must be positive");
    const double gain = 2.0 * s / N;
    StepOutcome out;
    StepRecord& r = out.record;
    r.gamma = gamma;
    const double inv_tau = 1.0 / d + pw.rho_b / gamma;
    r.tau = 1.0 / inv_tau;
    const double inv_theta = std::max(0.0, pw.rho_a * (inv_tau - gain));
    r.theta = inv_theta > 0.0 ? 1.0 / inv_theta : std::numeric_limits<double>::infinity();
    const double inv_eta = 1.0 / c + inv_theta;
    r.eta = 1.0 / inv_eta;
    if (inv_eta <= gain) {
        out.linfinity = true;
        r.delta = std::numeric_limits<double>::infinity();
        return out;
    }
    r.delta = 1.0 / (inv_eta - gain);
    return out;
}

/// The case 0 < p <= 1 < q: b = u^{q-1}|x|^{-beta}, a = v^{p/2}|x|^{-alpha}.
inline StepOutcome chain_step(double gamma, double d, double c, double p, int N, double s)
{
    return chain_step(gamma, d, c, ChainPowers{p / 2.0, 1.0}, N, s);
}

enum class ChainTerminal { Linfinity, MaxSteps, NotImproving };

inline std::string to_string(ChainTerminal t)
{
    switch (t) {
    case ChainTerminal::Linfinity: return "Linfinity";
    case ChainTerminal::MaxSteps: return "MaxSteps";
    case ChainTerminal::NotImproving: return "NotImproving";
    }
    return "unknown";
}

struct BootstrapChain {
    ProblemParams params;
    ExponentPair pair;
    double t = 0.0;
    double start_gamma = 0.0;
    CoefficientRanges ranges;
    double c = 0.0;
    double d = 0.0;
    std::vector<StepRecord> steps;
    ChainTerminal terminal = ChainTerminal::MaxSteps;
};

/// Iterates chain_step with gamma <- delta. Stops at L^infinity, after max_steps,
/// or, flagged NotImproving, at the first step with delta <= gamma.
inline BootstrapChain run_chain(double start_gamma, const ProblemParams& P, const ExponentPair& e, double t,
                                int max_steps = 20)
{
    BootstrapChain ch;
    ch.params = P;
    ch.pair = e;
    ch.t = t;
    ch.start_gamma = start_gamma;
    ch.ranges = coefficient_exponent_ranges(P, e, t);
    ch.c = kCoefficientShrink * ch.ranges.c_sup;
    ch.d = kCoefficientShrink * ch.ranges.d_sup;
    if (!(ch.c > 1.0 && ch.d > 1.0))
        throw Error(Errc::InvalidChain, "coefficient exponent range does not exceed 1");
    double gamma = start_gamma;
    ch.terminal = ChainTerminal::MaxSteps;
    for (int k = 0; k < max_steps; ++k) {
        const StepOutcome o = chain_step(gamma, ch.d, ch.c, ch.ranges.powers, P.N, P.s);
        ch.steps.push_back(o.record);
        if (o.linfinity) {
            ch.terminal = ChainTerminal::Linfinity;
            break;
        }
        if (!(o.record.delta > gamma)) {
            ch.terminal = ChainTerminal::NotImproving;
            break;
        }
        gamma = o.record.delta;
    }
    return ch;
}

struct HolderTrigger {
    bool u_side = false; ///< beta < 2s: u^q/|x|^beta in L^{N/2s}
    bool v_side = false; ///< alpha < 2s
    bool eligible() const noexcept { return u_side && v_side; }
};

inline HolderTrigger holder_trigger(const ProblemParams& P)
{
    return {P.beta < 2.0 * P.s, P.alpha < 2.0 * P.s};
}

/// (int |f|^delta |x|^{-gamma})^{1/delta} by the graded rule.
inline double weighted_norm_diagnostic(const Field& f, double delta, double gamma_weight, const QuadratureRule& rule)
{
    if (!(delta >= 1.0))
        throw Error(Errc::InvalidArgument, "norm exponent must be >= 1");
    if (!(gamma_weight < rule.domain.dim()))
        throw Error(Errc::WeightNotIntegrable, "weight |x|^{-gamma} needs gamma < N");
    auto vals = evaluate_field(f, rule.nodes);
    double vmax = 0.0;
    for (double& x : vals) {
        x = std::abs(x);
        vmax = std::max(vmax, x);
    }
    if (vmax == 0.0)
        return 0.0;
    // scale out the maximum so large delta does not overflow
    for (double& x : vals)
        x = std::pow(x / vmax, delta);
    return vmax * std::pow(integrate_weighted(vals, gamma_weight, rule), 1.0 / delta);
}

} // namespace fle
