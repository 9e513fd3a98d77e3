#pragma once

// Modal bases on the model domains and fields stored by their coefficients.

#include "fle/domain.hpp"
#include "fle/error.hpp"
#include "fle/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

namespace fle {

/// A finite family of functions on a domain, vanishing on the boundary.
class ModalBasis {
public:
    virtual ~ModalBasis() = default;

    virtual Domain domain() const = 0;
    virtual std::size_t size() const = 0;
    virtual std::string kind() const = 0;

    /// All mode values at one point of the closed domain; out has size() entries.
    virtual void evaluate_all(const Point& pt, double* out) const = 0;

    /// True when coefficient vectors of the two bases mean the same functions.
    virtual bool compatible(const ModalBasis& other) const = 0;

    /// Rows are points, columns are modes.
    virtual Eigen::MatrixXd tabulate(const std::vector<Point>& pts) const
    {
        Eigen::MatrixXd T(pts.size(), size());
        std::vector<double> row(size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            evaluate_all(pts[i], row.data());
            for (std::size_t k = 0; k < row.size(); ++k)
                T(i, k) = row[k];
        }
        return T;
    }
};

using BasisPtr = std::shared_ptr<const ModalBasis>;

/// Dirichlet eigenfunctions of -Delta. Interval: phi_k = sin(k pi (x+1)/2),
/// lambda_k = (k pi/2)^2. Square: tensor products sorted by eigenvalue, equal
/// eigenvalues ordered lexicographically by wave numbers.
class SineBasis final : public ModalBasis {
public:
    SineBasis(Domain domain, std::size_t M) : domain_(domain)
    {
        if (M < 1)
            throw Error(Errc::InvalidArgument, "basis size must be >= 1");
        const double c = std::numbers::pi * std::numbers::pi / 4.0;
        if (domain.kind == DomainKind::Interval) {
            for (std::size_t k = 1; k <= M; ++k) {
                modes_.push_back({static_cast<int>(k), 0});
                eig_.push_back(c * double(k) * double(k));
            }
        } else {
            std::vector<std::array<int, 2>> all;
            const int K = static_cast<int>(M);
            for (int a = 1; a <= K; ++a)
                for (int b = 1; b <= K; ++b)
                    all.push_back({a, b});
            std::sort(all.begin(), all.end(), [](const auto& l, const auto& r) {
                const int sl = l[0] * l[0] + l[1] * l[1], sr = r[0] * r[0] + r[1] * r[1];
                return sl != sr ? sl < sr : l < r;
            });
            all.resize(M);
            for (const auto& w : all) {
                modes_.push_back(w);
                eig_.push_back(c * double(w[0] * w[0] + w[1] * w[1]));
            }
        }
        for (const auto& w : modes_)
            kmax_ = std::max({kmax_, w[0], w[1]});
    }

    Domain domain() const override { return domain_; }
    std::size_t size() const override { return modes_.size(); }
    std::string kind() const override { return "sine"; }

    const std::vector<double>& eigenvalues() const noexcept { return eig_; }
    const std::vector<std::array<int, 2>>& wave_numbers() const noexcept { return modes_; }

    void evaluate_all(const Point& pt, double* out) const override
    {
        if (domain_.on_boundary(pt)) {
            std::fill(out, out + size(), 0.0);
            return;
        }
        std::vector<double> sx(kmax_ + 1), sy(kmax_ + 1, 1.0);
        for (int k = 1; k <= kmax_; ++k)
            sx[k] = std::sin(k * std::numbers::pi * (pt.x + 1.0) / 2.0);
        if (domain_.kind == DomainKind::Square)
            for (int k = 1; k <= kmax_; ++k)
                sy[k] = std::sin(k * std::numbers::pi * (pt.y + 1.0) / 2.0);
        for (std::size_t j = 0; j < modes_.size(); ++j)
            out[j] = domain_.kind == DomainKind::Interval ? sx[modes_[j][0]]
                                                          : sx[modes_[j][0]] * sy[modes_[j][1]];
    }

    bool compatible(const ModalBasis& other) const override
    {
        if (this == &other)
            return true;
        const auto* o = dynamic_cast<const SineBasis*>(&other);
        return o && o->domain_ == domain_ && o->size() == size();
    }

private:
    Domain domain_;
    std::vector<std::array<int, 2>> modes_;
    std::vector<double> eig_;
    int kmax_ = 0;
};

inline std::shared_ptr<const SineBasis> build_sine_basis(const Domain& domain, std::size_t M)
{
    return std::make_shared<const SineBasis>(domain, M);
}

inline std::size_t default_basis_size(const Domain& domain)
{
    return domain.kind == DomainKind::Interval ? 64 : 256;
}

/// Weights of the 4-point Lagrange interpolant at offset t (in units of h)
/// from the first stencil node.
inline std::array<double, 4> cubic_lagrange_weights(double t)
{
    return {-(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0, t * (t - 2.0) * (t - 3.0) / 2.0,
            -t * (t - 1.0) * (t - 3.0) / 2.0, t * (t - 1.0) * (t - 2.0) / 6.0};
}

/// First stencil node for cell [x_c, x_{c+1}] on a grid with nodes 0..n+1:
/// centred (c-1..c+2) inside, one-sided in the two boundary cells.
inline int cubic_stencil_start(int c, int n) noexcept
{
    return std::clamp(c - 1, 0, n - 2);
}

/// Grid functions on the uniform interval lattice x_j = -1 + j h, j = 0..n+1,
/// h = 2/(n+1), zero at both ends, evaluated between nodes by piecewise cubic
/// Lagrange interpolation. These are numerical eigenvectors, not closed forms.
class GridModeBasis final : public ModalBasis {
public:
    /// nodal: n x M matrix of interior values, one column per mode.
    GridModeBasis(Eigen::MatrixXd nodal, std::uint64_t id) : id_(id)
    {
        n_ = static_cast<int>(nodal.rows());
        if (n_ < 4)
            throw Error(Errc::InvalidArgument, "grid basis needs at least 4 interior nodes");
        h_ = 2.0 / (n_ + 1);
        values_ = Eigen::MatrixXd::Zero(n_ + 2, nodal.cols());
        values_.middleRows(1, n_) = nodal;
    }

    Domain domain() const override { return Domain::interval(); }
    std::size_t size() const override { return static_cast<std::size_t>(values_.cols()); }
    std::string kind() const override { return "restricted-grid"; }

    int grid_size() const noexcept { return n_; }
    double spacing() const noexcept { return h_; }
    double node(int j) const noexcept { return -1.0 + j * h_; }
    /// (n+2) x M including the zero boundary rows.
    const Eigen::MatrixXd& nodal_values() const noexcept { return values_; }

    void evaluate_all(const Point& pt, double* out) const override
    {
        const double u = (pt.x + 1.0) / h_;
        int c = std::clamp(static_cast<int>(std::floor(u)), 0, n_);
        const int j0 = cubic_stencil_start(c, n_);
        const auto w = cubic_lagrange_weights(u - j0);
        for (Eigen::Index k = 0; k < values_.cols(); ++k) {
            double acc = 0.0;
            for (int a = 0; a < 4; ++a)
                acc += w[a] * values_(j0 + a, k);
            out[k] = acc;
        }
        if (std::abs(std::abs(pt.x) - 1.0) <= 1e-14)
            std::fill(out, out + size(), 0.0);
    }

    bool compatible(const ModalBasis& other) const override
    {
        const auto* o = dynamic_cast<const GridModeBasis*>(&other);
        return o && o->id_ == id_ && o->size() == size();
    }

private:
    Eigen::MatrixXd values_;
    int n_ = 0;
    double h_ = 0.0;
    std::uint64_t id_ = 0;
};

inline std::uint64_t next_basis_id()
{
    static std::atomic<std::uint64_t> counter{1};
    return counter++;
}

struct Field {
    BasisPtr basis;
    Eigen::VectorXd coefficients;

    Field() = default;
    Field(BasisPtr b, Eigen::VectorXd c) : basis(std::move(b)), coefficients(std::move(c))
    {
        if (!basis || static_cast<std::size_t>(coefficients.size()) != basis->size())
            throw Error(Errc::BasisMismatch, "coefficient count does not match basis size");
    }

    static Field zero(BasisPtr b)
    {
        const auto M = b->size();
        return Field(std::move(b), Eigen::VectorXd::Zero(M));
    }
    static Field mode(BasisPtr b, std::size_t k)
    {
        Field f = zero(std::move(b));
        f.coefficients(k) = 1.0;
        return f;
    }
};

inline void require_compatible(const ModalBasis& a, const ModalBasis& b)
{
    if (!a.compatible(b))
        throw Error(Errc::BasisMismatch, "fields live on different bases");
}

inline std::vector<double> evaluate_field(const Field& f, const std::vector<Point>& pts)
{
    const Domain dom = f.basis->domain();
    std::vector<double> out(pts.size());
    std::vector<double> row(f.basis->size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!dom.in_closure(pts[i]))
            throw Error(Errc::PointOutsideDomain, "evaluation point outside the closed domain");
        if (dom.on_boundary(pts[i])) {
            out[i] = 0.0;
            continue;
        }
        f.basis->evaluate_all(pts[i], row.data());
        double acc = 0.0;
        for (std::size_t k = 0; k < row.size(); ++k)
            acc += f.coefficients[k] * row[k];
        out[i] = acc;
    }
    return out;
}

inline double evaluate_field(const Field& f, const Point& pt) { return evaluate_field(f, std::vector<Point>{pt})[0]; }

/// xi_k = sum_i w_i u(x_i) phi_k(x_i).
inline Field project(const std::vector<double>& values, const QuadratureRule& rule, const BasisPtr& basis)
{
    if (values.size() != rule.size())
        throw Error(Errc::GridMismatch, "value count does not match quadrature nodes");
    if (!(rule.domain == basis->domain()))
        throw Error(Errc::GridMismatch, "quadrature rule and basis live on different domains");
    const Eigen::MatrixXd T = basis->tabulate(rule.nodes);
    Eigen::VectorXd wu(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        wu[i] = rule.weights[i] * values[i];
    return Field(basis, T.transpose() * wu);
}

} // namespace fle
