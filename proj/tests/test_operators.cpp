#include "fle/operators.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace fle;
using std::numbers::pi;

TEST(NormalizationConstant, ClosedFormsInterval)
{
    for (double s : {0.01, 0.1, 0.25, 0.4, 0.5, 0.6, 0.75, 0.9, 0.99})
        EXPECT_NEAR(normalization_constant(1, s) / oracle::cns1(s), 1.0, 1e-10) << s;
    EXPECT_NEAR(normalization_constant(1, 0.5), 1.0 / pi, 1e-12);
}

TEST(NormalizationConstant, ClosedFormsSquare)
{
    for (double s : {0.05, 0.25, 0.5, 0.75, 0.95})
        EXPECT_NEAR(normalization_constant(2, s) / oracle::cns2(s), 1.0, 1e-10) << s;
}

TEST(NormalizationConstant, IndependentQuadratureRoute)
{
    // C(1,s) = 1 / int_R (1 - cos z)/|z|^{1+2s} dz
    for (double s : {0.2, 0.5, 0.8}) {
        const double ref = 1.0 / (2.0 * oracle::half_line_split(s));
        EXPECT_NEAR(normalization_constant(1, s) / ref, 1.0, 1e-9) << s;
    }
}

TEST(NormalizationConstant, InternalRoutesAgree)
{
    for (double s : {0.3, 0.7}) {
        const double a = detail::normalization_constant_with(1, s, 0.5, 48, 40, 12);
        const double b = detail::normalization_constant_with(1, s, 1.0, 64, 48, 14);
        EXPECT_NEAR(a / b, 1.0, 1e-11);
    }
}

TEST(NormalizationConstant, RejectsBadInput)
{
    EXPECT_THROW(normalization_constant(1, 0.0), Error);
    EXPECT_THROW(normalization_constant(1, 1.0), Error);
    EXPECT_THROW(normalization_constant(3, 0.5), Error);
}

TEST(Spectral, MultipliersAndPowers)
{
    const auto op = make_spectral(Domain::interval(), 16, 0.25);
    EXPECT_NEAR(op.multipliers[0], std::pow(pi * pi / 4, 0.25), 1e-14);
    EXPECT_NEAR(op.multipliers[0], std::sqrt(pi / 2), 1e-14);
    const Eigen::VectorXd p = op.power(0.5);
    for (int k = 0; k < 16; ++k)
        EXPECT_NEAR(p[k], std::pow(op.laplacian_eigenvalues[k], 0.5), 1e-12);
}

TEST(Spectral, ApplyInverseRoundTrip)
{
    const auto op = make_spectral(Domain::square(), 64, 0.6);
    Eigen::VectorXd c = Eigen::VectorXd::LinSpaced(64, 1.0, -2.0);
    const Field f(op.basis, c);
    EXPECT_LT((solve_inverse(op, apply(op, f)).coefficients - c).cwiseAbs().maxCoeff(), 1e-12);
    const Field g = fractional_power_apply(op, fractional_power_apply(op, f, 0.3), -0.3);
    EXPECT_LT((g.coefficients - c).cwiseAbs().maxCoeff(), 1e-12);
    // L = A^s is lambda^s times identity on modes
    const Field h = fractional_power_apply(op, f, 0.6);
    EXPECT_LT((h.coefficients - apply(op, f).coefficients).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Spectral, BasisMismatch)
{
    const auto a = make_spectral(Domain::interval(), 16, 0.5);
    const auto b = make_spectral(Domain::interval(), 32, 0.5);
    try {
        apply(a, Field::mode(b.basis, 0));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::BasisMismatch);
    }
}

TEST(Spectral, GridApplyMatchesEigenvalue)
{
    const int n = 127;
    Eigen::VectorXd u(n);
    for (int i = 0; i < n; ++i)
        u[i] = std::sin(3 * pi * (i + 1.0) / (n + 1.0));
    const Eigen::VectorXd a = spectral_apply_on_grid(u, 0.4);
    EXPECT_LT((a - std::pow(1.5 * pi, 0.8) * u).cwiseAbs().maxCoeff(), 1e-11);
}

class RestrictedApply : public ::testing::TestWithParam<double> {};

TEST_P(RestrictedApply, MatchesPrincipalValueAtInteriorPoints)
{
    const double s = GetParam();
    const int n = 512;
    const auto K = assemble_restricted_stiffness(n, s);
    Eigen::VectorXd u(n);
    for (int i = 0; i < n; ++i)
        u[i] = std::cos(0.5 * pi * K->node(i));
    const Eigen::VectorXd a = K->apply(u);
    for (int i : {64, 160, 255, 256, 300, 400}) {
        const double ref = oracle::restricted_first_mode(K->node(i), s);
        EXPECT_LT(std::abs(a[i] - ref) / std::abs(ref), 1e-4) << "x=" << K->node(i);
    }
}

INSTANTIATE_TEST_SUITE_P(Orders, RestrictedApply, ::testing::Values(0.25, 0.5, 0.75));

TEST(Restricted, SymmetricAndAscending)
{
    const auto op = assemble_restricted(Domain::interval(), 128, 0.5, 20);
    const auto& A = op.stiffness->matrix;
    EXPECT_EQ((A - A.transpose()).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_LT(op.stiffness->asymmetry, 0.02);
    for (int k = 1; k < 20; ++k)
        EXPECT_LT(op.multipliers[k - 1], op.multipliers[k]);
    EXPECT_GT(op.multipliers[0], 0.0);
}

TEST(Restricted, PositiveRowAction)
{
    // the constant function 1 (extended by 0): (-Delta)^s 1 > 0 everywhere inside
    const auto K = assemble_restricted_stiffness(64, 0.3);
    const Eigen::VectorXd r = K->apply(Eigen::VectorXd::Ones(64));
    EXPECT_GT(r.minCoeff(), 0.0);
}

TEST(Restricted, ModeBasisIsDiscretelyOrthonormal)
{
    const auto op = assemble_restricted(Domain::interval(), 64, 0.5, 8);
    const auto* g = dynamic_cast<const GridModeBasis*>(op.basis.get());
    ASSERT_NE(g, nullptr);
    const Eigen::MatrixXd V = g->nodal_values().middleRows(1, 64);
    const Eigen::MatrixXd G = g->spacing() * V.transpose() * V;
    EXPECT_LT((G - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_GT(V.col(0).minCoeff(), 0.0);
    EXPECT_THROW(fractional_power_apply(op, Field::mode(op.basis, 0), 0.5), Error);
}

TEST(Restricted, FirstEigenvalueConvergesUnderRefinement)
{
    for (double s : {0.25, 0.5, 0.75}) {
        const double a = restricted_first_eigenvalue(128, s);
        const double b = restricted_first_eigenvalue(256, s);
        const double c = restricted_first_eigenvalue(512, s);
        EXPECT_LT(std::abs(c - b), std::abs(b - a)) << s;
        EXPECT_LT(std::abs(c - b), 1e-3) << s;
    }
}

TEST(Restricted, FirstEigenvalueBelowSpectral)
{
    for (double s : {0.25, 0.5, 0.75}) {
        const auto r = compare_first_eigenvalue(Domain::interval(), s, 256);
        EXPECT_TRUE(r.strict) << s << " mu1=" << r.mu1 << " lambda=" << r.lambda1_s;
    }
    EXPECT_THROW(compare_first_eigenvalue(Domain::square(), 0.5, 64), Error);
}

TEST(Restricted, RejectsSquareAndSmallGrids)
{
    try {
        assemble_restricted(Domain::square(), 64, 0.5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::UnsupportedKind);
    }
    EXPECT_THROW(assemble_restricted_stiffness(8, 0.5), Error);
}

TEST(Domination, FirstModeAndZero)
{
    const auto basis = build_sine_basis(Domain::interval(), 4);
    const auto r = pointwise_domination_check(Field::mode(basis, 0), 0.5, 256);
    EXPECT_GE(r.min_difference, -1e-6);
    const auto z = pointwise_domination_check(Field::zero(basis), 0.5, 256);
    EXPECT_EQ(z.min_difference, 0.0);
}

TEST(Domination, BumpFunction)
{
    const auto K = assemble_restricted_stiffness(256, 0.5);
    Eigen::VectorXd u(256);
    for (int i = 0; i < 256; ++i) {
        const double x = K->node(i);
        u[i] = (1 - x * x) * (1 - x * x);
    }
    EXPECT_GE(pointwise_domination_check(*K, u).min_difference, -1e-6);
}

TEST(Domination, InputChecks)
{
    const auto K = assemble_restricted_stiffness(32, 0.5);
    Eigen::VectorXd u = Eigen::VectorXd::Ones(32);
    u[3] = -0.1;
    try {
        pointwise_domination_check(*K, u);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::NegativeInput);
    }
    try {
        pointwise_domination_check(*K, Eigen::VectorXd::Ones(31));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::GridMismatch);
    }
}

TEST(Operators, KindParsing)
{
    EXPECT_EQ(parse_operator_kind("spectral"), OperatorKind::Spectral);
    EXPECT_EQ(parse_operator_kind("restricted"), OperatorKind::Restricted);
    EXPECT_THROW(parse_operator_kind("fourier"), Error);
    const auto sm = summarize(make_spectral(Domain::interval(), 64, 0.5), 3);
    EXPECT_EQ(sm.first_multipliers.size(), 3u);
    EXPECT_NEAR(sm.first_multipliers[1], pi, 1e-14);
}
