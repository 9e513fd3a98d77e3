#pragma once

// Hamiltonian, quadratic form, Lagrangian J = Q - int H, Theta^t norms, the
// E+/E- splitting and the weak-form residual.

#include "fle/basis.hpp"
#include "fle/error.hpp"
#include "fle/exponents.hpp"
#include "fle/gauss.hpp"
#include "fle/operators.hpp"
#include "fle/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <utility>
#include <vector>

namespace fle {

struct SolutionPair {
    Field u;
    Field v;
    ProblemParams params;
    ExponentPair pair;
    double t = 0.0;
};

struct EnergyReport {
    double Q = 0.0;
    double H_integral = 0.0;
    double J = 0.0;            ///< Q - H_integral
    double residual_sup = 0.0; ///< max over modes of |F_k|, |G_k|
    double residual_dual = 0.0;
};

inline double positive_power(double x, double e) noexcept { return x > 0.0 ? std::pow(x, e) : 0.0; }

namespace detail {

inline bool is_integer(double e) noexcept { return e == std::round(e); }

/// x^e with the sign kept for integer e, positive part otherwise.
inline double raw_power(double x, double e) noexcept
{
    if (is_integer(e))
        return std::pow(x, e);
    return positive_power(x, e);
}

} // namespace detail

/// H = v^{p+1}/((p+1)|x|^alpha) + u^{q+1}/((q+1)|x|^beta). The modified form
/// uses positive parts term by term and vanishes on the negative quadrant.
inline double hamiltonian_density(double u, double v, double r, const ProblemParams& P,
                                  const ExponentPair& e, bool modified = true)
{
    auto pw = [modified](double x, double k) { return modified ? positive_power(x, k) : detail::raw_power(x, k); };
    return pw(v, e.p + 1.0) / ((e.p + 1.0) * std::pow(r, P.alpha))
        + pw(u, e.q + 1.0) / ((e.q + 1.0) * std::pow(r, P.beta));
}

/// (H_u, H_v) = (u^q/|x|^beta, v^p/|x|^alpha).
inline std::pair<double, double> hamiltonian_gradients(double u, double v, double r, const ProblemParams& P,
                                                       const ExponentPair& e, bool modified = true)
{
    auto pw = [modified](double x, double k) { return modified ? positive_power(x, k) : detail::raw_power(x, k); };
    return {pw(u, e.q) / std::pow(r, P.beta), pw(v, e.p) / std::pow(r, P.alpha)};
}

/// Everything needed to evaluate the nonlinearity of one problem on one
/// quadrature rule: modes tabulated at the nodes and the two weighted weight
/// vectors.
struct GalerkinContext {
    DiscreteOperator op;
    QuadratureRule rule;
    ProblemParams params;
    ExponentPair pair;
    Eigen::MatrixXd phi;  ///< nodes x modes
    Eigen::VectorXd w_alpha; ///< w_i |x_i|^{-alpha}
    Eigen::VectorXd w_beta;  ///< w_i |x_i|^{-beta}

    GalerkinContext(DiscreteOperator o, QuadratureRule r, const ProblemParams& P, const ExponentPair& e)
        : op(std::move(o)), rule(std::move(r)), params(P), pair(e)
    {
        if (!(rule.domain == op.basis->domain()))
            throw Error(Errc::GridMismatch, "quadrature rule and operator live on different domains");
        phi = op.basis->tabulate(rule.nodes);
        const auto wa = rule.weighted(P.alpha);
        const auto wb = rule.weighted(P.beta);
        w_alpha = Eigen::Map<const Eigen::VectorXd>(wa.data(), static_cast<Eigen::Index>(wa.size()));
        w_beta = Eigen::Map<const Eigen::VectorXd>(wb.data(), static_cast<Eigen::Index>(wb.size()));
    }

    std::size_t modes() const noexcept { return op.size(); }

    Eigen::VectorXd values(const Eigen::VectorXd& c) const { return phi * c; }

    /// Coefficients of int f w phi_k for nodal f.
    Eigen::VectorXd moments(const Eigen::VectorXd& f, const Eigen::VectorXd& w) const
    {
        return phi.transpose() * f.cwiseProduct(w);
    }

    /// Nodal v_+^p and u_+^q.
    Eigen::VectorXd pow_plus(const Eigen::VectorXd& vals, double e) const
    {
        Eigen::VectorXd out(vals.size());
        for (Eigen::Index i = 0; i < vals.size(); ++i)
            out[i] = positive_power(vals[i], e);
        return out;
    }

    /// int H~(u, v, x) dx from coefficient vectors.
    double hamiltonian_integral(const Eigen::VectorXd& c, const Eigen::VectorXd& d) const
    {
        return hamiltonian_integral_nodal(values(c), values(d));
    }

    double hamiltonian_integral_nodal(const Eigen::VectorXd& uv, const Eigen::VectorXd& vv) const
    {
        std::vector<double> terms(static_cast<std::size_t>(uv.size()));
        const double p1 = pair.p + 1.0, q1 = pair.q + 1.0;
        for (Eigen::Index i = 0; i < uv.size(); ++i)
            terms[i] = w_alpha[i] * positive_power(vv[i], p1) / p1 + w_beta[i] * positive_power(uv[i], q1) / q1;
        return pairwise_sum(terms);
    }

    /// F_k = mu_k c_k - int v_+^p |x|^{-alpha} phi_k,  G_k = mu_k d_k - int u_+^q |x|^{-beta} phi_k.
    std::pair<Eigen::VectorXd, Eigen::VectorXd> residual(const Eigen::VectorXd& c, const Eigen::VectorXd& d) const
    {
        const Eigen::VectorXd F = op.multipliers.cwiseProduct(c) - moments(pow_plus(values(d), pair.p), w_alpha);
        const Eigen::VectorXd G = op.multipliers.cwiseProduct(d) - moments(pow_plus(values(c), pair.q), w_beta);
        return {F, G};
    }

    double quadratic(const Eigen::VectorXd& c, const Eigen::VectorXd& d) const
    {
        return (op.multipliers.cwiseProduct(c).cwiseProduct(d)).sum();
    }
};

inline double quadratic_form(const SolutionPair& z, const DiscreteOperator& op)
{
    require_compatible(*op.basis, *z.u.basis);
    require_compatible(*op.basis, *z.v.basis);
    return (op.multipliers.cwiseProduct(z.u.coefficients).cwiseProduct(z.v.coefficients)).sum();
}

/// (sum_k lambda_k^t xi_k^2)^{1/2}; lambda_k^t = mu_k^{t/s}.
inline double theta_norm(const Field& f, double t, const DiscreteOperator& op)
{
    require_compatible(*op.basis, *f.basis);
    return std::sqrt(op.power(t).dot(f.coefficients.cwiseProduct(f.coefficients)));
}

struct WeakResidual {
    Eigen::VectorXd F;
    Eigen::VectorXd G;
    double sup = 0.0;
    double dual = 0.0; ///< (sum_k mu_k^{-1} (F_k^2 + G_k^2))^{1/2}
};

inline WeakResidual weak_residual(const GalerkinContext& ctx, const Eigen::VectorXd& c, const Eigen::VectorXd& d)
{
    WeakResidual r;
    std::tie(r.F, r.G) = ctx.residual(c, d);
    r.sup = std::max(r.F.cwiseAbs().maxCoeff(), r.G.cwiseAbs().maxCoeff());
    const Eigen::VectorXd inv = ctx.op.multipliers.cwiseInverse();
    r.dual = std::sqrt(inv.dot(r.F.cwiseAbs2()) + inv.dot(r.G.cwiseAbs2()));
    return r;
}

inline void require_pair_on(const SolutionPair& z, const DiscreteOperator& op)
{
    require_compatible(*op.basis, *z.u.basis);
    require_compatible(*op.basis, *z.v.basis);
}

inline WeakResidual weak_residual(const SolutionPair& z, const DiscreteOperator& op, const QuadratureRule& rule)
{
    require_pair_on(z, op);
    const GalerkinContext ctx(op, rule, z.params, z.pair);
    return weak_residual(ctx, z.u.coefficients, z.v.coefficients);
}

inline EnergyReport lagrangian(const GalerkinContext& ctx, const Eigen::VectorXd& c, const Eigen::VectorXd& d)
{
    EnergyReport e;
    e.Q = ctx.quadratic(c, d);
    e.H_integral = ctx.hamiltonian_integral(c, d);
    e.J = e.Q - e.H_integral;
    const auto r = weak_residual(ctx, c, d);
    e.residual_sup = r.sup;
    e.residual_dual = r.dual;
    return e;
}

inline EnergyReport lagrangian(const SolutionPair& z, const DiscreteOperator& op, const QuadratureRule& rule)
{
    require_pair_on(z, op);
    const GalerkinContext ctx(op, rule, z.params, z.pair);
    return lagrangian(ctx, z.u.coefficients, z.v.coefficients);
}

/// Gradient of J in coefficient space, (dJ/dc, dJ/dd), by fourth-order central
/// differences of J alone. At a weak solution it vanishes; it equals (G, F).
inline Eigen::VectorXd lagrangian_gradient_fd(const GalerkinContext& ctx, const Eigen::VectorXd& c,
                                              const Eigen::VectorXd& d, double h = 1e-3)
{
    const Eigen::Index M = c.size();
    Eigen::VectorXd grad(2 * M);
    const Eigen::VectorXd uv = ctx.values(c), vv = ctx.values(d);
    auto J = [&](const Eigen::VectorXd& un, const Eigen::VectorXd& vn, const Eigen::VectorXd& cc,
                 const Eigen::VectorXd& dd) { return ctx.quadratic(cc, dd) - ctx.hamiltonian_integral_nodal(un, vn); };
    const double step[4] = {-2.0, -1.0, 1.0, 2.0};
    const double coef[4] = {1.0, -8.0, 8.0, -1.0};
    for (Eigen::Index k = 0; k < M; ++k) {
        double gc = 0.0, gd = 0.0;
        for (int a = 0; a < 4; ++a) {
            const double dh = step[a] * h;
            Eigen::VectorXd cc = c, dd = d;
            cc[k] += dh;
            gc += coef[a] * J(uv + dh * ctx.phi.col(k), vv, cc, d);
            dd[k] += dh;
            gd += coef[a] * J(uv, vv + dh * ctx.phi.col(k), c, dd);
        }
        grad[k] = gc / (12.0 * h);
        grad[M + k] = gd / (12.0 * h);
    }
    return grad;
}

struct EDecomposition {
    Field u_plus, v_plus;
    Field u_minus, v_minus;
};

/// Splits (u, v) along E+ = {(w, A^{t-s} w)} and E- = {(w, -A^{t-s} w)}:
/// u_k^{+-} = (c_k +- lambda_k^{s-t} d_k)/2, v^{+-} = +-A^{t-s} u^{+-}.
inline EDecomposition eplus_eminus_decompose(const SolutionPair& z, const DiscreteOperator& op)
{
    if (op.kind != OperatorKind::Spectral)
        throw Error(Errc::UnsupportedKind, "the E+/E- splitting uses analytic eigenvalue powers");
    require_pair_on(z, op);
    const Eigen::VectorXd up = op.power(z.params.s - z.t); // lambda^{s-t}
    const Eigen::VectorXd down = op.power(z.t - z.params.s);
    const Eigen::VectorXd& c = z.u.coefficients;
    const Eigen::VectorXd& d = z.v.coefficients;
    const Eigen::VectorXd cp = 0.5 * (c + up.cwiseProduct(d));
    const Eigen::VectorXd cm = 0.5 * (c - up.cwiseProduct(d));
    return {Field(op.basis, cp), Field(op.basis, down.cwiseProduct(cp)), Field(op.basis, cm),
            Field(op.basis, -down.cwiseProduct(cm))};
}

} // namespace fle
