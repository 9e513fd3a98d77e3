#pragma once

// Smooth nonnegative test functions on (-1,1) vanishing at the endpoints,
// for the nodal comparison of the two fractional operators.

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

namespace fle {

struct BatteryField {
    std::string name;
    std::function<double(double)> f;
};

/// phi_1^m g with m in {1,3,5,7,9} and four positive profiles g. Every member
/// extends oddly across x = +-1, so its sine series converges spectrally.
inline std::vector<BatteryField> domination_battery()
{
    using std::numbers::pi;
    const std::vector<std::pair<std::string, std::function<double(double)>>> profiles = {
        {"1", [](double) { return 1.0; }},
        {"1+cos/2", [](double x) { return 1.0 + 0.5 * std::cos(pi * x); }},
        {"1-cos/2", [](double x) { return 1.0 - 0.5 * std::cos(pi * x); }},
        {"exp(cos2/2)", [](double x) { return std::exp(0.5 * std::cos(2.0 * pi * x)); }},
    };
    std::vector<BatteryField> out;
    for (int m : {1, 3, 5, 7, 9})
        for (const auto& [gname, g] : profiles)
            out.push_back({"phi1^" + std::to_string(m) + "*" + gname,
                           [m, g](double x) { return std::pow(std::cos(0.5 * pi * x), m) * g(x); }});
    return out;
}

inline BatteryField bump_field()
{
    return {"(1-x^2)^2", [](double x) { return (1.0 - x * x) * (1.0 - x * x); }};
}

} // namespace fle
