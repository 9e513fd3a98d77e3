#pragma once

#include "fle/error.hpp"

#include <cmath>
#include <string>
#include <string_view>

namespace fle {

enum class DomainKind { Interval, Square };

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// The model domains (-1,1) and (-1,1)^2; both contain the origin, where the
/// weights |x|^{-alpha}, |x|^{-beta} are singular.
struct Domain {
    DomainKind kind = DomainKind::Interval;

    static Domain interval() { return {DomainKind::Interval}; }
    static Domain square() { return {DomainKind::Square}; }

    int dim() const noexcept { return kind == DomainKind::Interval ? 1 : 2; }
    double measure() const noexcept { return kind == DomainKind::Interval ? 2.0 : 4.0; }

    double radius(const Point& pt) const noexcept
    {
        return kind == DomainKind::Interval ? std::abs(pt.x) : std::hypot(pt.x, pt.y);
    }

    bool in_closure(const Point& pt, double tol = 1e-14) const noexcept
    {
        const bool xin = std::abs(pt.x) <= 1.0 + tol;
        if (kind == DomainKind::Interval)
            return xin && pt.y == 0.0;
        return xin && std::abs(pt.y) <= 1.0 + tol;
    }

    bool on_boundary(const Point& pt, double tol = 1e-14) const noexcept
    {
        if (!in_closure(pt, tol))
            return false;
        const bool xb = std::abs(std::abs(pt.x) - 1.0) <= tol;
        if (kind == DomainKind::Interval)
            return xb;
        return xb || std::abs(std::abs(pt.y) - 1.0) <= tol;
    }

    bool operator==(const Domain&) const = default;
};

inline std::string_view to_string(DomainKind k) noexcept
{
    return k == DomainKind::Interval ? "interval" : "square";
}

inline Domain parse_domain(std::string_view name)
{
    if (name == "interval")
        return Domain::interval();
    if (name == "square")
        return Domain::square();
    throw Error(Errc::InvalidArgument, "unknown domain '" + std::string(name) + "'");
}

} // namespace fle
