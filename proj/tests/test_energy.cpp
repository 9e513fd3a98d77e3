#include "fle/energy.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace fle;
using std::numbers::pi;

namespace {

ProblemParams params(int N, double s, double a = 0.0, double b = 0.0) { return {N, s, a, b}; }

struct Interval {
    DiscreteOperator op;
    QuadratureRule rule;
    Interval(double s, std::size_t M, double gamma = 0.0)
        : op(make_spectral(Domain::interval(), M, s)),
          rule(build_graded_rule(Domain::interval(), GradedRuleSpec{gamma, 24, 12, 2.0, 1.0 / 32}))
    {
    }
};

Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index n, double decay = 1.0)
{
    std::normal_distribution<double> G;
    Eigen::VectorXd v(n);
    for (Eigen::Index k = 0; k < n; ++k)
        v[k] = G(rng) / std::pow(k + 1.0, decay);
    return v;
}

} // namespace

TEST(Hamiltonian, Examples)
{
    const auto P = params(1, 0.5);
    EXPECT_EQ(hamiltonian_density(0, 0, 0.3, P, {2, 3}), 0.0);
    EXPECT_EQ(hamiltonian_density(-1, -1, 0.3, P, {1.5, 2.5}, true), 0.0);
    EXPECT_DOUBLE_EQ(hamiltonian_density(1, 1, 1.0, P, {1, 1}), 1.0);
    const auto g = hamiltonian_gradients(2, 1, 1.0, P, {1, 2});
    EXPECT_DOUBLE_EQ(g.first, 4.0);
    EXPECT_DOUBLE_EQ(g.second, 1.0);
    const auto m = hamiltonian_gradients(-3, 5, 1.0, P, {2, 2}, true);
    EXPECT_EQ(m.first, 0.0);
    EXPECT_DOUBLE_EQ(m.second, 25.0);
    const auto z = hamiltonian_gradients(0, 0, 0.7, P, {3, 3});
    EXPECT_EQ(z.first, 0.0);
    EXPECT_EQ(z.second, 0.0);
}

TEST(Hamiltonian, WeightsAndRawForm)
{
    const auto P = params(1, 0.25, 0.5, 0.25);
    const double r = 0.25;
    EXPECT_NEAR(hamiltonian_density(1, 2, r, P, {1, 2}),
                4.0 / (2 * std::pow(r, 0.5)) + 1.0 / (3 * std::pow(r, 0.25)), 1e-14);
    // integer exponents keep signs in the raw form: (-1)^2/2 + (-1)^3/3
    EXPECT_NEAR(hamiltonian_density(-1, -1, 1.0, params(1, 0.5), {1, 2}, false), 0.5 - 1.0 / 3.0, 1e-15);
    EXPECT_EQ(hamiltonian_density(-1, -1, 1.0, params(1, 0.5), {0.5, 1.5}, false), 0.0);
}

TEST(Hamiltonian, ModifiedMatchesRawOnPositiveQuadrantAndIsContinuous)
{
    const auto P = params(1, 0.5, 0.2, 0.1);
    const ExponentPair e{1.7, 2.4};
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(0.0, 3.0);
    for (int i = 0; i < 200; ++i) {
        const double u = U(rng), v = U(rng), r = 0.1 + U(rng) / 3;
        EXPECT_NEAR(hamiltonian_density(u, v, r, P, e, true), hamiltonian_density(u, v, r, P, e, false), 1e-13);
        // across u = 0 and v = 0
        EXPECT_NEAR(hamiltonian_density(1e-9, v, r, P, e), hamiltonian_density(-1e-9, v, r, P, e), 1e-12);
        EXPECT_NEAR(hamiltonian_density(u, 1e-9, r, P, e), hamiltonian_density(u, -1e-9, r, P, e), 1e-12);
    }
}

TEST(QuadraticForm, Examples)
{
    const auto op = make_spectral(Domain::interval(), 8, 0.5);
    SolutionPair z{Field::mode(op.basis, 0), Field::mode(op.basis, 0), params(1, 0.5), {1, 1}, 0.5};
    EXPECT_NEAR(quadratic_form(z, op), pi / 2, 1e-15);
    z.v = Field::mode(op.basis, 1);
    EXPECT_EQ(quadratic_form(z, op), 0.0);
    z.v = Field::zero(op.basis);
    EXPECT_EQ(quadratic_form(z, op), 0.0);
    const auto other = make_spectral(Domain::interval(), 9, 0.5);
    z.v = Field::mode(other.basis, 0);
    try {
        quadratic_form(z, op);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::BasisMismatch);
    }
}

TEST(Lagrangian, Examples)
{
    Interval S(0.5, 8);
    SolutionPair z{Field::zero(S.op.basis), Field::zero(S.op.basis), params(1, 0.5), {1, 1}, 0.5};
    const auto e0 = lagrangian(z, S.op, S.rule);
    EXPECT_EQ(e0.J, 0.0);
    EXPECT_EQ(e0.residual_sup, 0.0);
    z.u = z.v = Field::mode(S.op.basis, 0);
    const auto e1 = lagrangian(z, S.op, S.rule);
    EXPECT_NEAR(e1.J, pi / 2 - 1, 1e-12);
    EXPECT_EQ(e1.J, e1.Q - e1.H_integral);
}

TEST(Lagrangian, GeneralPairHasNonzeroResidual)
{
    Interval S(0.5, 8);
    SolutionPair z{Field::mode(S.op.basis, 0), Field::mode(S.op.basis, 0), params(1, 0.5), {2, 3}, 0.5};
    const auto w = weak_residual(z, S.op, S.rule);
    EXPECT_GT(w.sup, 1e-3);
    // residual of the first mode: mu_1 - int phi_1^{p+1}
    const double m3 = 8.0 / (3.0 * pi); // int_{-1}^1 cos^3(pi x/2) dx
    EXPECT_NEAR(w.F[0], pi / 2 - m3, 1e-12);
}

TEST(ThetaNorm, Examples)
{
    const auto op = make_spectral(Domain::interval(), 16, 0.5);
    std::mt19937_64 rng(3);
    const Eigen::VectorXd c = random_vector(rng, 16);
    const Field f(op.basis, c);
    EXPECT_NEAR(theta_norm(f, 0.0, op), c.norm(), 1e-14);
    EXPECT_NEAR(theta_norm(Field::mode(op.basis, 0), 1.0, op), pi / 2, 1e-14);
    // t = s gives <u, L u>^{1/2}
    EXPECT_NEAR(theta_norm(f, 0.5, op), std::sqrt(c.dot(apply(op, f).coefficients)), 1e-12);
}

TEST(ThetaNorm, DualityPairingBound)
{
    const auto op = make_spectral(Domain::square(), 64, 0.3);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> T(-2.0, 2.0);
    for (int i = 0; i < 200; ++i) {
        const Field f(op.basis, random_vector(rng, 64, 0.0));
        const Field g(op.basis, random_vector(rng, 64, 0.0));
        const double t = T(rng);
        const double pairing = std::abs(f.coefficients.dot(g.coefficients));
        EXPECT_GE(theta_norm(f, t, op) * theta_norm(g, -t, op), pairing * (1 - 1e-14));
    }
}

TEST(EDecomposition, PureElementsAndRoundTrip)
{
    const double s = 0.4, t = 0.3;
    const auto op = make_spectral(Domain::interval(), 32, s);
    std::mt19937_64 rng(9);
    const Eigen::VectorXd c = random_vector(rng, 32);
    const Eigen::VectorXd At = op.power(t - s);
    SolutionPair pure{Field(op.basis, c), Field(op.basis, At.cwiseProduct(c)), params(1, s), {2, 2}, t};
    const auto d = eplus_eminus_decompose(pure, op);
    EXPECT_LT(d.u_minus.coefficients.cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LT(d.v_minus.coefficients.cwiseAbs().maxCoeff(), 1e-14);

    for (int i = 0; i < 50; ++i) {
        SolutionPair z{Field(op.basis, random_vector(rng, 32)), Field(op.basis, random_vector(rng, 32)), params(1, s),
                       {2, 2}, t};
        const auto e = eplus_eminus_decompose(z, op);
        EXPECT_LT((e.u_plus.coefficients + e.u_minus.coefficients - z.u.coefficients).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT((e.v_plus.coefficients + e.v_minus.coefficients - z.v.coefficients).cwiseAbs().maxCoeff(), 1e-12);
        // projections are idempotent
        SolutionPair zp{e.u_plus, e.v_plus, z.params, z.pair, t};
        const auto again = eplus_eminus_decompose(zp, op);
        EXPECT_LT((again.u_plus.coefficients - e.u_plus.coefficients).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT(again.u_minus.coefficients.cwiseAbs().maxCoeff(), 1e-12);
        SolutionPair zm{e.u_minus, e.v_minus, z.params, z.pair, t};
        EXPECT_GE(quadratic_form(zp, op), 0.0);
        EXPECT_LE(quadratic_form(zm, op), 0.0);
    }
}

TEST(EDecomposition, RestrictedUnsupported)
{
    const auto op = assemble_restricted(Domain::interval(), 32, 0.5, 4);
    SolutionPair z{Field::mode(op.basis, 0), Field::mode(op.basis, 0), params(1, 0.5), {2, 2}, 0.5};
    try {
        eplus_eminus_decompose(z, op);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::UnsupportedKind);
    }
}

TEST(WeakResidual, ZeroPairAndDualNorm)
{
    Interval S(0.25, 16, 0.5);
    const auto P = params(1, 0.25, 0.5, 0.25);
    SolutionPair z{Field::zero(S.op.basis), Field::zero(S.op.basis), P, {2, 3}, 0.25};
    const auto w = weak_residual(z, S.op, S.rule);
    EXPECT_EQ(w.F.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(w.G.cwiseAbs().maxCoeff(), 0.0);
    std::mt19937_64 rng(2);
    z.u = Field(S.op.basis, random_vector(rng, 16, 2.0));
    z.v = Field(S.op.basis, random_vector(rng, 16, 2.0));
    const auto r = weak_residual(z, S.op, S.rule);
    double acc = 0;
    for (int k = 0; k < 16; ++k)
        acc += (r.F[k] * r.F[k] + r.G[k] * r.G[k]) / S.op.multipliers[k];
    EXPECT_NEAR(r.dual, std::sqrt(acc), 1e-13);
}

TEST(Lagrangian, FiniteDifferenceGradientIsResidualPair)
{
    Interval S(0.5, 12, 0.25);
    const auto P = params(1, 0.5, 0.25, 0.0);
    const ExponentPair e{2, 3};
    const GalerkinContext ctx(S.op, S.rule, P, e);
    std::mt19937_64 rng(4);
    Eigen::VectorXd c = random_vector(rng, 12, 2.0), d = random_vector(rng, 12, 2.0);
    c[0] += 1.5;
    d[0] += 1.5;
    const auto [F, G] = ctx.residual(c, d);
    const Eigen::VectorXd g = lagrangian_gradient_fd(ctx, c, d);
    EXPECT_LT((g.head(12) - G).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT((g.tail(12) - F).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Galerkin, DomainMismatch)
{
    const auto op = make_spectral(Domain::interval(), 8, 0.5);
    const auto sq = build_graded_rule(Domain::square(), 0.0, 4, 4);
    try {
        GalerkinContext ctx(op, sq, params(1, 0.5), {2, 2});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::GridMismatch);
    }
}
