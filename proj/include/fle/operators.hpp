#pragma once

// The spectral fractional Laplacian A^s (powers of the Dirichlet eigenvalues)
// and the restricted fractional Laplacian (-Delta)^s (singular integral of the
// zero extension), with the comparison checks between them.

#include "fle/basis.hpp"
#include "fle/error.hpp"
#include "fle/gauss.hpp"
#include "fle/parallel.hpp"
#include "fle/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

namespace fle {

enum class OperatorKind { Spectral, Restricted };

inline std::string to_string(OperatorKind k) { return k == OperatorKind::Spectral ? "spectral" : "restricted"; }

inline OperatorKind parse_operator_kind(const std::string& name)
{
    if (name == "spectral")
        return OperatorKind::Spectral;
    if (name == "restricted")
        return OperatorKind::Restricted;
    throw Error(Errc::InvalidArgument, "unknown operator kind '" + name + "'");
}

namespace detail {

/// Re of int_A^inf e^{iz} z^{-a} dz from the asymptotic expansion
/// i e^{iA} A^{-a} sum_k (-i)^k (a)_k A^{-k}, truncated at its smallest term.
inline double oscillatory_tail(double a, double A)
{
    using C = std::complex<double>;
    C sum = 0.0, term = 1.0;
    double last = 1e300;
    for (int k = 0; k < 200; ++k) {
        const double mag = std::abs(term);
        if (mag > last)
            break;
        sum += term;
        if (mag < 1e-18)
            break;
        last = mag;
        term *= C(0.0, -1.0) * (a + k) / A;
    }
    return (C(0.0, 1.0) * std::exp(C(0.0, A)) * std::pow(A, -a) * sum).real();
}

/// int_0^inf (1 - cos z) z^{-1-2s} dz, split at z = b. On [0, b] the series
/// (1 - cos z)/z^2 = sum_k (-1)^k z^{2k}/(2k+2)! is integrated term by term
/// against z^{1-2s}; [b, A] uses Gauss panels an eighth of a period wide;
/// [A, inf) is closed form plus the asymptotic cosine tail.
inline double half_line_integral(double s, double b, int periods, int order)
{
    const double a = 1.0 + 2.0 * s;
    double I = 0.0;
    {
        double fact = 2.0; // (2k+2)!
        for (int k = 0; k < 60; ++k) {
            if (k > 0)
                fact *= (2.0 * k + 1.0) * (2.0 * k + 2.0);
            const double e = 2.0 * k + 2.0 - 2.0 * s;
            const double term = std::pow(b, e) / (fact * e);
            I += (k % 2 == 0) ? term : -term;
            if (term < 1e-20 * I)
                break;
        }
    }
    const double A = 2.0 * std::numbers::pi * periods;
    {
        const GaussLegendre g = gauss_legendre(order);
        const double width = std::numbers::pi / 4.0;
        const int np = static_cast<int>(std::ceil((A - b) / width));
        std::vector<double> t;
        t.reserve(static_cast<std::size_t>(np) * g.nodes.size());
        for (int p = 0; p < np; ++p) {
            const double lo = b + (A - b) * p / np, hi = b + (A - b) * (p + 1) / np;
            const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
            for (std::size_t i = 0; i < g.nodes.size(); ++i) {
                const double z = c + h * g.nodes[i], sh = std::sin(0.5 * z);
                t.push_back(h * g.weights[i] * 2.0 * sh * sh * std::pow(z, -a));
            }
        }
        I += pairwise_sum(t);
    }
    I += std::pow(A, -2.0 * s) / (2.0 * s) - oscillatory_tail(a, A);
    return I;
}

/// int_R (1 + w^2)^{-1-s} dw = 2 int_0^{pi/2} sin^{2s}(phi) dphi.
inline double transverse_integral(double s, int panels, int order)
{
    const double L = std::numbers::pi / 2.0;
    const auto r = graded_unit_rule(-2.0 * s, panels, order, 2.0, 0.125);
    std::vector<double> t(r.size());
    for (std::size_t i = 0; i < r.size(); ++i)
        t[i] = r[i].w * std::pow(std::sin(L * r[i].x), 2.0 * s);
    return 2.0 * L * pairwise_sum(t);
}

inline double normalization_constant_with(int N, double s, double split, int periods, int panels, int order)
{
    double I = 2.0 * half_line_integral(s, split, periods, order);
    if (N == 2)
        I *= transverse_integral(s, panels, order);
    return 1.0 / I;
}

} // namespace detail

/// C(N,s) = ( int_{R^N} (1 - cos zeta_1)/|zeta|^{N+2s} dzeta )^{-1}, computed by
/// two quadrature decompositions that must agree. In 2D the transverse variable
/// integrates out to a one-dimensional factor.
inline double normalization_constant(int N, double s)
{
    if (!(N == 1 || N == 2) || !(s > 0.0 && s < 1.0))
        throw Error(Errc::InvalidArgument, "normalization constant needs N in {1,2} and 0<s<1");
    const double c1 = detail::normalization_constant_with(N, s, 0.5, 48, 40, 12);
    const double c2 = detail::normalization_constant_with(N, s, 1.0, 64, 48, 14);
    if (!(std::abs(c1 - c2) <= 1e-11 * std::abs(c2)) || !(c2 > 0.0))
        throw Error(Errc::QuadratureFailure, "normalization constant quadratures disagree");
    return c2;
}

/// Collocation matrix of (-Delta)^s on the interior nodes x_i = -1 + i h,
/// h = 2/(n+1), for functions vanishing outside (-1,1).
///
/// Row i: away from |y - x_i| < h the integrand is integrated cell by cell with
/// u replaced by its piecewise cubic interpolant (one-sided stencils in the two
/// boundary cells); inside the window a second-order Taylor correction
/// -u''(x_i) h^{2-2s}/(2-2s) uses the central difference; the exterior part
/// u(x_i) int_{|y|>1} |x_i - y|^{-1-2s} dy is exact. The resulting matrix is
/// nonsymmetric at the level of the interpolation error; the stored matrix is
/// its symmetric part, which keeps the quadratic form and a real orthonormal
/// eigenbasis.
struct RestrictedStiffness {
    int n = 0;
    double s = 0.0;
    double h = 0.0;
    double cns = 0.0;              ///< C(1,s)
    double asymmetry = 0.0;        ///< ||A - A^T||_F / ||A||_F before symmetrization
    Eigen::MatrixXd matrix;        ///< symmetric n x n

    double node(int i) const noexcept { return -1.0 + (i + 1) * h; } ///< 0-based interior index
    Eigen::VectorXd apply(const Eigen::VectorXd& u) const { return matrix * u; }
};

inline Eigen::MatrixXd assemble_restricted_unsymmetric(int n, double s, double cns)
{
    const double h = 2.0 / (n + 1);
    const GaussLegendre g = gauss_legendre(24);
    const int ng = static_cast<int>(g.nodes.size());
    std::vector<double> gx(ng), gw(ng);
    for (int k = 0; k < ng; ++k) {
        gx[k] = 0.5 * (g.nodes[k] + 1.0);
        gw[k] = 0.5 * g.weights[k];
    }
    // interpolation weights per cell and Gauss point (grid nodes 0..n+1)
    std::vector<std::array<double, 4>> lag(static_cast<std::size_t>(n + 1) * ng);
    for (int c = 0; c <= n; ++c) {
        const int j0 = cubic_stencil_start(c, n);
        for (int k = 0; k < ng; ++k)
            lag[static_cast<std::size_t>(c) * ng + k] = cubic_lagrange_weights(c + gx[k] - j0);
    }
    const double e = -1.0 - 2.0 * s;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    parallel_for(1, n + 1, [&](long il) {
        const int i = static_cast<int>(il);
        double self = 0.0;
        for (int c = 0; c <= n; ++c) {
            if (c == i - 1 || c == i)
                continue;
            const int j0 = cubic_stencil_start(c, n);
            for (int k = 0; k < ng; ++k) {
                const double K = gw[k] * std::pow(std::abs(c + gx[k] - i), e);
                self += K;
                const auto& L = lag[static_cast<std::size_t>(c) * ng + k];
                for (int a = 0; a < 4; ++a) {
                    const int col = j0 + a;
                    if (col >= 1 && col <= n)
                        A(i - 1, col - 1) -= K * L[a];
                }
            }
        }
        const double x = -1.0 + i * h;
        const double tail = std::pow(h, 2.0 * s) * (std::pow(1.0 - x, -2.0 * s) + std::pow(1.0 + x, -2.0 * s)) / (2.0 * s);
        const double near = 1.0 / (2.0 - 2.0 * s);
        A(i - 1, i - 1) += self + tail + 2.0 * near;
        if (i > 1)
            A(i - 1, i - 2) -= near;
        if (i < n)
            A(i - 1, i) -= near;
    });
    return A * (cns * std::pow(h, -2.0 * s));
}

inline std::shared_ptr<const RestrictedStiffness> assemble_restricted_stiffness(int n, double s)
{
    if (n < 16)
        throw Error(Errc::InvalidArgument, "restricted collocation needs n >= 16");
    if (!(s > 0.0 && s < 1.0))
        throw Error(Errc::InvalidArgument, "need 0 < s < 1");
    auto K = std::make_shared<RestrictedStiffness>();
    K->n = n;
    K->s = s;
    K->h = 2.0 / (n + 1);
    K->cns = normalization_constant(1, s);
    const Eigen::MatrixXd A = assemble_restricted_unsymmetric(n, s, K->cns);
    K->asymmetry = (A - A.transpose()).norm() / A.norm();
    K->matrix = 0.5 * (A + A.transpose());
    return K;
}

/// A discrete self-adjoint positive operator diagonal in a modal basis.
struct DiscreteOperator {
    OperatorKind kind = OperatorKind::Spectral;
    double s = 0.5;
    BasisPtr basis;
    Eigen::VectorXd multipliers;                       ///< ascending, > 0
    Eigen::VectorXd laplacian_eigenvalues;             ///< Spectral only
    std::shared_ptr<const RestrictedStiffness> stiffness; ///< Restricted only

    std::size_t size() const noexcept { return static_cast<std::size_t>(multipliers.size()); }

    /// Multipliers of L^{r/s}, i.e. lambda_k^r for the spectral operator.
    /// For the restricted operator this is the power of its numerical
    /// eigen-decomposition.
    Eigen::VectorXd power(double r) const
    {
        Eigen::VectorXd out(multipliers.size());
        for (Eigen::Index k = 0; k < out.size(); ++k)
            out[k] = kind == OperatorKind::Spectral ? std::pow(laplacian_eigenvalues[k], r)
                                                    : std::pow(multipliers[k], r / s);
        return out;
    }
};

inline DiscreteOperator make_spectral(const Domain& domain, std::size_t M, double s)
{
    if (!(s > 0.0 && s < 1.0))
        throw Error(Errc::InvalidArgument, "need 0 < s < 1");
    auto basis = build_sine_basis(domain, M);
    DiscreteOperator op;
    op.kind = OperatorKind::Spectral;
    op.s = s;
    op.basis = basis;
    const auto& lam = basis->eigenvalues();
    op.laplacian_eigenvalues = Eigen::Map<const Eigen::VectorXd>(lam.data(), static_cast<Eigen::Index>(lam.size()));
    op.multipliers = op.laplacian_eigenvalues.array().pow(s).matrix();
    return op;
}

/// Restricted operator on the interval from its collocation matrix. Keeps the
/// lowest `modes` eigenpairs (all when 0); psi_k are the eigenvectors scaled to
/// unit discrete L^2 norm h sum psi^2 = 1, with the largest entry positive.
inline DiscreteOperator assemble_restricted(const Domain& domain, int n, double s, int modes = 0)
{
    if (domain.kind != DomainKind::Interval)
        throw Error(Errc::UnsupportedKind, "the restricted operator is built on the interval only");
    auto K = assemble_restricted_stiffness(n, s);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K->matrix);
    if (es.info() != Eigen::Success)
        throw Error(Errc::QuadratureFailure, "eigen-decomposition of the stiffness matrix failed");
    const int m = modes > 0 ? std::min(modes, n) : n;
    Eigen::MatrixXd V = es.eigenvectors().leftCols(m) / std::sqrt(K->h);
    for (int k = 0; k < m; ++k) {
        Eigen::Index imax = 0;
        V.col(k).cwiseAbs().maxCoeff(&imax);
        if (V(imax, k) < 0.0)
            V.col(k) = -V.col(k);
    }
    DiscreteOperator op;
    op.kind = OperatorKind::Restricted;
    op.s = s;
    op.multipliers = es.eigenvalues().head(m);
    if (!(op.multipliers[0] > 0.0))
        throw Error(Errc::QuadratureFailure, "stiffness matrix is not positive definite");
    op.basis = std::make_shared<const GridModeBasis>(std::move(V), next_basis_id());
    op.stiffness = std::move(K);
    return op;
}

inline DiscreteOperator make_operator(OperatorKind kind, const Domain& domain, std::size_t M, double s,
                                      int grid_n = 512)
{
    if (kind == OperatorKind::Spectral)
        return make_spectral(domain, M, s);
    return assemble_restricted(domain, grid_n, s, static_cast<int>(M));
}

inline Field apply(const DiscreteOperator& op, const Field& f)
{
    require_compatible(*op.basis, *f.basis);
    return Field(op.basis, f.coefficients.cwiseProduct(op.multipliers));
}

inline Field solve_inverse(const DiscreteOperator& op, const Field& rhs)
{
    require_compatible(*op.basis, *rhs.basis);
    return Field(op.basis, rhs.coefficients.cwiseQuotient(op.multipliers));
}

/// Multiplies coefficients by lambda_k^r (any real r).
inline Field fractional_power_apply(const DiscreteOperator& op, const Field& f, double r)
{
    if (op.kind != OperatorKind::Spectral)
        throw Error(Errc::UnsupportedKind, "analytic fractional powers exist for the spectral operator only");
    require_compatible(*op.basis, *f.basis);
    return Field(op.basis, f.coefficients.cwiseProduct(op.power(r)));
}

struct EigenvalueComparison {
    double s = 0.0;
    int n = 0;
    double mu1 = 0.0;      ///< restricted, grid n
    double mu1_fine = 0.0; ///< restricted, grid 2n
    double lambda1_s = 0.0;
    double margin = 0.0;   ///< |mu1(n) - mu1(2n)|
    bool strict = false;   ///< mu1 < lambda1^s - margin
};

inline double restricted_first_eigenvalue(int n, double s)
{
    const auto K = assemble_restricted_stiffness(n, s);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K->matrix, Eigen::EigenvaluesOnly);
    return es.eigenvalues()[0];
}

inline EigenvalueComparison compare_first_eigenvalue(const Domain& domain, double s, int n)
{
    if (domain.kind != DomainKind::Interval)
        throw Error(Errc::UnsupportedKind, "eigenvalue comparison runs on the interval");
    EigenvalueComparison r;
    r.s = s;
    r.n = n;
    r.mu1 = restricted_first_eigenvalue(n, s);
    r.mu1_fine = restricted_first_eigenvalue(2 * n, s);
    r.lambda1_s = std::pow(std::numbers::pi * std::numbers::pi / 4.0, s);
    r.margin = std::abs(r.mu1 - r.mu1_fine);
    r.strict = r.mu1 < r.lambda1_s - r.margin;
    return r;
}

/// Discrete A^s on the interior lattice through the orthogonal sine transform:
/// sin(k pi (x_i+1)/2) = sin(k pi i/(n+1)) is exact at the nodes.
inline Eigen::VectorXd spectral_apply_on_grid(const Eigen::VectorXd& u, double s)
{
    const Eigen::Index n = u.size();
    const double c = std::sqrt(2.0 / (n + 1.0));
    Eigen::MatrixXd S(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = 0; k < n; ++k)
            S(i, k) = c * std::sin(std::numbers::pi * double((i + 1) * (k + 1) % (2 * (n + 1))) / (n + 1.0));
    Eigen::VectorXd xi = S.transpose() * u;
    for (Eigen::Index k = 0; k < n; ++k)
        xi[k] *= std::pow(std::numbers::pi * (k + 1) / 2.0, 2.0 * s);
    return S * xi;
}

struct DominationReport {
    double s = 0.0;
    int n = 0;
    double min_difference = 0.0; ///< min over interior nodes of (A^s u - (-Delta)^s u)
    double argmin_x = 0.0;
    double max_abs_spectral = 0.0;
};

inline DominationReport pointwise_domination_check(const RestrictedStiffness& K, const Eigen::VectorXd& u)
{
    if (u.size() != K.n)
        throw Error(Errc::GridMismatch, "nodal vector does not match the collocation grid");
    for (Eigen::Index i = 0; i < u.size(); ++i)
        if (u[i] < 0.0)
            throw Error(Errc::NegativeInput, "domination check needs nonnegative nodal values");
    const Eigen::VectorXd a = spectral_apply_on_grid(u, K.s);
    const Eigen::VectorXd d = a - K.apply(u);
    DominationReport r;
    r.s = K.s;
    r.n = K.n;
    Eigen::Index imin = 0;
    r.min_difference = d.minCoeff(&imin);
    r.argmin_x = K.node(static_cast<int>(imin));
    r.max_abs_spectral = a.cwiseAbs().maxCoeff();
    return r;
}

/// Samples a field at the interior collocation nodes and runs the nodal check.
inline DominationReport pointwise_domination_check(const Field& u, double s, int n)
{
    if (u.basis->domain().kind != DomainKind::Interval)
        throw Error(Errc::UnsupportedKind, "domination check runs on the interval");
    const auto K = assemble_restricted_stiffness(n, s);
    std::vector<Point> pts(n);
    for (int i = 0; i < n; ++i)
        pts[i] = {K->node(i), 0.0};
    const auto vals = evaluate_field(u, pts);
    return pointwise_domination_check(*K, Eigen::Map<const Eigen::VectorXd>(vals.data(), n));
}

struct OperatorSummary {
    OperatorKind kind;
    double s;
    std::size_t size;          ///< M (spectral) or kept modes (restricted)
    int grid_n;                ///< restricted only, else 0
    std::vector<double> first_multipliers;
};

inline OperatorSummary summarize(const DiscreteOperator& op, std::size_t count = 10)
{
    OperatorSummary r{op.kind, op.s, op.size(), op.stiffness ? op.stiffness->n : 0, {}};
    for (std::size_t k = 0; k < std::min(count, op.size()); ++k)
        r.first_multipliers.push_back(op.multipliers[static_cast<Eigen::Index>(k)]);
    return r;
}

} // namespace fle
