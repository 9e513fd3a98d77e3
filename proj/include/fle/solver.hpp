#pragma once

// Positive weak solutions by normalized nonlinear power iteration followed by
// damped Newton refinement, and sweeps of (p, q) along rays toward the
// critical hyperbole.

#include "fle/basis.hpp"
#include "fle/energy.hpp"
#include "fle/error.hpp"
#include "fle/exponents.hpp"
#include "fle/operators.hpp"
#include "fle/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace fle {

struct SolverConfig {
    std::size_t M = 64;
    GradedRuleSpec rule{0.0, 32, 12, 2.0, 1.0 / 32.0}; ///< gamma is raised to max(alpha, beta) when built
    double tol_fix = 1e-12;
    double tol_res = 1e-10;
    int max_power_iter = 2000;
    int max_newton_iter = 50;
    double damping = 1.0;
    std::vector<double> smoothing_eps{1e-2, 1e-4, 1e-6, 1e-8, 1e-10};
    double min_norm = 1e-8;
    int grid_n = 512;        ///< collocation grid of the restricted operator
    int positivity_grid = 2001;

    void validate() const
    {
        if (!(tol_fix > 0.0 && tol_res > 0.0 && min_norm > 0.0))
            throw Error(Errc::InvalidArgument, "solver tolerances and min_norm must be positive");
        if (M < 1 || max_power_iter < 1 || max_newton_iter < 0 || !(damping > 0.0 && damping <= 1.0))
            throw Error(Errc::InvalidArgument, "invalid solver iteration settings");
        for (double e : smoothing_eps)
            if (!(e > 0.0))
                throw Error(Errc::InvalidArgument, "smoothing schedule entries must be positive");
    }
};

inline QuadratureRule build_solver_rule(const Domain& domain, const SolverConfig& cfg, const ProblemParams& P)
{
    GradedRuleSpec spec = cfg.rule;
    spec.gamma = std::max({spec.gamma, P.alpha, P.beta, 0.0});
    return build_graded_rule(domain, spec);
}

struct SolveResult {
    SolutionPair pair;
    EnergyReport energy;
    int iter_power = 0;
    int iter_newton = 0;
    double positivity_min = 0.0;
    double kappa = 0.0;      ///< Rayleigh factor ||T(u^)|| at the converged direction
    double sup_u = 0.0;
    double theta_norm_u = 0.0;
    bool converged = false;
    bool trivial = false;
    std::string status;      ///< "ok" or the reason for failure
};

/// T(u) coefficients and the intermediate v = L^{-1}(|x|^{-beta} u_+^q).
struct TApplication {
    Eigen::VectorXd Tu;
    Eigen::VectorXd v;
};

inline TApplication apply_T(const GalerkinContext& ctx, const Eigen::VectorXd& c)
{
    const auto& mu = ctx.op.multipliers;
    TApplication r;
    r.v = ctx.moments(ctx.pow_plus(ctx.values(c), ctx.pair.q), ctx.w_beta).cwiseQuotient(mu);
    r.Tu = ctx.moments(ctx.pow_plus(ctx.values(r.v), ctx.pair.p), ctx.w_alpha).cwiseQuotient(mu);
    return r;
}

namespace detail {

inline SolutionPair make_pair(const GalerkinContext& ctx, const Eigen::VectorXd& c, const Eigen::VectorXd& d, double t)
{
    return {Field(ctx.op.basis, c), Field(ctx.op.basis, d), ctx.params, ctx.pair, t};
}

inline std::vector<Point> positivity_points(const Domain& dom, int n)
{
    std::vector<Point> pts;
    if (dom.kind == DomainKind::Interval) {
        for (int j = 1; j <= n; ++j)
            pts.push_back({-1.0 + 2.0 * j / (n + 1.0), 0.0});
    } else {
        const int m = std::max(3, static_cast<int>(std::lround(std::sqrt(double(n)) / 2.0)) * 2 + 1);
        for (int i = 1; i <= m; ++i)
            for (int j = 1; j <= m; ++j)
                pts.push_back({-1.0 + 2.0 * i / (m + 1.0), -1.0 + 2.0 * j / (m + 1.0)});
    }
    return pts;
}

} // namespace detail

/// Interior sample points used for positivity and sup-norm statistics: a
/// uniform lattice containing the origin.
inline std::vector<Point> fine_grid(const Domain& dom, int n = 2001) { return detail::positivity_points(dom, n); }

/// min over the points of min(u, v).
inline double positivity_check(const SolveResult& r, const std::vector<Point>& pts)
{
    const auto u = evaluate_field(r.pair.u, pts);
    const auto v = evaluate_field(r.pair.v, pts);
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i)
        m = std::min({m, u[i], v[i]});
    return pts.empty() ? 0.0 : m;
}

/// Fills energy, positivity and norm statistics of a finished result.
inline void finalize_result(const GalerkinContext& ctx, SolveResult& r, int positivity_grid)
{
    const auto& c = r.pair.u.coefficients;
    const auto& d = r.pair.v.coefficients;
    r.energy = lagrangian(ctx, c, d);
    const auto pts = fine_grid(ctx.op.basis->domain(), positivity_grid);
    r.positivity_min = positivity_check(r, pts);
    const auto uv = evaluate_field(r.pair.u, pts);
    r.sup_u = 0.0;
    for (double x : uv)
        r.sup_u = std::max(r.sup_u, std::abs(x));
    r.theta_norm_u = theta_norm(r.pair.u, r.pair.t, ctx.op);
}

inline void require_regime(const ProblemParams& P, const ExponentPair& e, double t)
{
    if (!is_superlinear(e))
        throw Error(Errc::UnsupportedRegime, "the normalized iteration needs pq > 1");
    const auto rep = check_problem(P, e, t);
    if (!rep.admissible()) {
        std::string what = "inadmissible problem:";
        for (const auto& n : rep.failed())
            what += " " + n;
        throw Error(Errc::AdmissibilityFailure, what);
    }
}

/// u^ <- T(u^)/||T(u^)||. On convergence of the direction, u = kappa^{-1/(pq-1)} u^
/// and v = L^{-1}(|x|^{-beta} u_+^q).
inline SolveResult nonlinear_power_iteration(const GalerkinContext& ctx, double t, const SolverConfig& cfg,
                                             const std::optional<Eigen::VectorXd>& start = std::nullopt)
{
    cfg.validate();
    require_regime(ctx.params, ctx.pair, t);
    const std::size_t M = ctx.modes();
    Eigen::VectorXd u = start ? *start : Eigen::VectorXd::Unit(static_cast<Eigen::Index>(M), 0);
    if (static_cast<std::size_t>(u.size()) != M)
        throw Error(Errc::BasisMismatch, "start direction has the wrong length");
    if (!(u.norm() > 0.0))
        throw Error(Errc::TrivialCollapse, "start direction is zero");
    u /= u.norm();

    const double pq = ctx.pair.p * ctx.pair.q;
    double kappa = 0.0;
    bool done = false;
    int it = 0;
    while (it < cfg.max_power_iter) {
        ++it;
        const auto T = apply_T(ctx, u);
        kappa = T.Tu.norm();
        if (!(kappa > 0.0) || !std::isfinite(kappa))
            throw Error(Errc::TrivialCollapse, "T annihilated the iterate (no positive part)");
        const Eigen::VectorXd next = T.Tu / kappa;
        const double change = (next - u).norm();
        u = next;
        if (change <= cfg.tol_fix) {
            done = true;
            break;
        }
    }
    if (!done)
        throw Error(Errc::NotConverged, "power iteration hit max_power_iter");

    // recompute kappa at the final direction so the rescaling is consistent
    kappa = apply_T(ctx, u).Tu.norm();
    const Eigen::VectorXd c = std::pow(kappa, -1.0 / (pq - 1.0)) * u;
    if (c.norm() < cfg.min_norm)
        throw Error(Errc::TrivialCollapse, "solution norm below min_norm");
    const Eigen::VectorXd d = apply_T(ctx, c).v;

    SolveResult r;
    r.pair = detail::make_pair(ctx, c, d, t);
    r.iter_power = it;
    r.kappa = kappa;
    finalize_result(ctx, r, cfg.positivity_grid);
    r.converged = r.energy.residual_sup <= 10.0 * cfg.tol_res;
    r.status = r.converged ? "ok" : "residual above tolerance after power iteration";
    return r;
}

namespace detail {

/// d/dv of v_+^e with the derivative e (v_+^2 + eps^2)^{(e-1)/2} when e < 1.
inline double smoothed_derivative(double v, double e, double eps)
{
    if (!(v > 0.0))
        return 0.0;
    if (e >= 1.0)
        return e * std::pow(v, e - 1.0);
    return e * std::pow(v * v + eps * eps, 0.5 * (e - 1.0));
}

inline Eigen::MatrixXd mass(const GalerkinContext& ctx, const Eigen::VectorXd& vals, const Eigen::VectorXd& w,
                            double e, double eps)
{
    Eigen::VectorXd dw(vals.size());
    for (Eigen::Index i = 0; i < vals.size(); ++i)
        dw[i] = w[i] * smoothed_derivative(vals[i], e, eps);
    return ctx.phi.transpose() * dw.asDiagonal() * ctx.phi;
}

inline Eigen::VectorXd stacked(const std::pair<Eigen::VectorXd, Eigen::VectorXd>& FG)
{
    Eigen::VectorXd R(FG.first.size() + FG.second.size());
    R << FG.first, FG.second;
    return R;
}

} // namespace detail

/// Damped Newton on (F, G) with a halving line search that accepts only strict
/// decrease of ||(F, G)||_2. Sublinear powers get the smoothed Jacobian, with
/// eps driven down the configured schedule. The residual itself is never
/// smoothed.
inline SolveResult newton_refine(const GalerkinContext& ctx, const SolveResult& seed, const SolverConfig& cfg)
{
    cfg.validate();
    SolveResult r = seed;
    Eigen::VectorXd c = seed.pair.u.coefficients, d = seed.pair.v.coefficients;
    if (!c.allFinite() || !d.allFinite())
        throw Error(Errc::InvalidArgument, "Newton seed is not finite");
    const Eigen::Index M = c.size();
    const auto& mu = ctx.op.multipliers;

    auto R = detail::stacked(ctx.residual(c, d));
    if (c.norm() == 0.0 && d.norm() == 0.0 && R.cwiseAbs().maxCoeff() == 0.0) {
        r.trivial = true;
        r.converged = false;
        r.status = "trivial pair";
        finalize_result(ctx, r, cfg.positivity_grid);
        return r;
    }

    const bool smooth = ctx.pair.p < 1.0 || ctx.pair.q < 1.0;
    const std::vector<double> schedule = smooth ? cfg.smoothing_eps : std::vector<double>{0.0};
    int iters = 0;
    double rnorm = R.norm();
    for (double eps : schedule) {
        while (R.cwiseAbs().maxCoeff() > cfg.tol_res && iters < cfg.max_newton_iter) {
            const Eigen::VectorXd uv = ctx.values(c), vv = ctx.values(d);
            Eigen::MatrixXd Jm(2 * M, 2 * M);
            Jm.setZero();
            Jm.topLeftCorner(M, M).diagonal() = mu;
            Jm.bottomRightCorner(M, M).diagonal() = mu;
            Jm.topRightCorner(M, M) = -detail::mass(ctx, vv, ctx.w_alpha, ctx.pair.p, eps);
            Jm.bottomLeftCorner(M, M) = -detail::mass(ctx, uv, ctx.w_beta, ctx.pair.q, eps);
            Eigen::FullPivLU<Eigen::MatrixXd> lu(Jm);
            if (!lu.isInvertible())
                throw Error(Errc::SingularJacobian, "Newton Jacobian is singular");
            const Eigen::VectorXd step = lu.solve(-R);
            if (!step.allFinite())
                throw Error(Errc::SingularJacobian, "Newton step is not finite");

            double lambda = cfg.damping;
            bool accepted = false;
            for (int ls = 0; ls < 40; ++ls, lambda *= 0.5) {
                const Eigen::VectorXd c2 = c + lambda * step.head(M), d2 = d + lambda * step.tail(M);
                const auto R2 = detail::stacked(ctx.residual(c2, d2));
                const double n2 = R2.norm();
                if (n2 < rnorm) {
                    c = c2;
                    d = d2;
                    R = R2;
                    rnorm = n2;
                    accepted = true;
                    break;
                }
            }
            ++iters;
            if (!accepted)
                break; // no descent with this Jacobian; try the next eps
        }
        if (R.cwiseAbs().maxCoeff() <= cfg.tol_res)
            break;
    }

    r.pair = detail::make_pair(ctx, c, d, seed.pair.t);
    r.iter_newton = iters;
    finalize_result(ctx, r, cfg.positivity_grid);
    r.converged = r.energy.residual_sup <= cfg.tol_res && r.pair.u.coefficients.norm() >= cfg.min_norm;
    if (!r.converged)
        throw Error(Errc::NotConverged, "Newton stopped at residual " + std::to_string(r.energy.residual_sup));
    r.status = "ok";
    return r;
}

/// Power iteration, then Newton. Convergence failures are reported in the
/// result; regime and admissibility violations throw.
inline SolveResult solve(const GalerkinContext& ctx, double t, const SolverConfig& cfg,
                         const std::optional<Eigen::VectorXd>& start = std::nullopt)
{
    SolveResult seed;
    try {
        seed = nonlinear_power_iteration(ctx, t, cfg, start);
    } catch (const Error& e) {
        if (e.code() != Errc::NotConverged && e.code() != Errc::TrivialCollapse)
            throw;
        SolveResult bad;
        bad.pair = detail::make_pair(ctx, Eigen::VectorXd::Zero(ctx.modes()), Eigen::VectorXd::Zero(ctx.modes()), t);
        bad.status = e.what();
        bad.trivial = e.code() == Errc::TrivialCollapse;
        bad.iter_power = cfg.max_power_iter;
        return bad;
    }
    try {
        SolveResult r = newton_refine(ctx, seed, cfg);
        r.iter_power = seed.iter_power;
        r.kappa = seed.kappa;
        return r;
    } catch (const Error& e) {
        if (e.code() != Errc::NotConverged && e.code() != Errc::SingularJacobian)
            throw;
        seed.converged = false;
        seed.status = e.what();
        return seed;
    }
}

/// Builds operator and rule from the configuration, then solves.
inline SolveResult solve(const ProblemParams& P, const ExponentPair& e, double t, const Domain& domain,
                         OperatorKind kind, const SolverConfig& cfg)
{
    P.validate();
    e.validate();
    const auto op = make_operator(kind, domain, cfg.M, P.s, cfg.grid_n);
    const GalerkinContext ctx(op, build_solver_rule(domain, cfg, P), P, e);
    return solve(ctx, t, cfg);
}

struct SweepRow {
    double theta = 0.0;
    double p = 0.0;
    double q = 0.0;
    double gap = 0.0;
    double sup_u = std::numeric_limits<double>::quiet_NaN();
    double theta_norm_u = std::numeric_limits<double>::quiet_NaN();
    double J = std::numeric_limits<double>::quiet_NaN();
    int iter_power = 0;
    int iter_newton = 0;
    bool converged = false;
    bool warm = false;
    std::string status;
};

struct SweepReport {
    ExponentPair ray;
    std::vector<SweepRow> rows;
};

/// theta = p/p0: solves at theta (p0, q0) for each theta in order, starting
/// each solve from the previous direction and retrying cold on failure.
inline SweepReport sweep_to_critical(const ProblemParams& P, const ExponentPair& ray, const std::vector<double>& thetas,
                                     double t, const DiscreteOperator& op, const SolverConfig& cfg)
{
    SweepReport rep;
    rep.ray = ray;
    const auto rule = build_solver_rule(op.basis->domain(), cfg, P);
    std::optional<Eigen::VectorXd> warm;
    for (double th : thetas) {
        SweepRow row;
        row.theta = th;
        const ExponentPair e = ray.scaled(th);
        row.p = e.p;
        row.q = e.q;
        row.gap = hyperbole_gap(P, e);
        if (!(row.gap > 0.0) || !is_superlinear(e)) {
            row.status = std::string(to_string(Errc::AdmissibilityFailure))
                + (row.gap > 0.0 ? ": pq <= 1" : ": on or above the critical hyperbole");
            rep.rows.push_back(row);
            continue;
        }
        const GalerkinContext ctx(op, rule, P, e);
        auto record = [&](const SolveResult& r) {
            row.sup_u = r.sup_u;
            row.theta_norm_u = r.theta_norm_u;
            row.J = r.energy.J;
            row.iter_power = r.iter_power;
            row.iter_newton = r.iter_newton;
            row.converged = r.converged;
            row.status = r.converged ? "ok" : r.status;
        };
        try {
            SolveResult r = solve(ctx, t, cfg, warm);
            row.warm = warm.has_value();
            if (!r.converged && warm) {
                r = solve(ctx, t, cfg);
                row.warm = false;
            }
            record(r);
            if (r.converged)
                warm = r.pair.u.coefficients.normalized();
        } catch (const Error& err) {
            row.status = err.what();
        }
        rep.rows.push_back(row);
    }
    return rep;
}

} // namespace fle
