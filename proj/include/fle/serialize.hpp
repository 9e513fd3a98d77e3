#pragma once

// JSON views of the library types. Non-finite numbers become null.

#include "fle/bootstrap.hpp"
#include "fle/energy.hpp"
#include "fle/exponents.hpp"
#include "fle/operators.hpp"
#include "fle/solver.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <vector>

namespace fle {

using json = nlohmann::ordered_json;

inline json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline json to_json(const Eigen::VectorXd& v)
{
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        a.push_back(num(v[i]));
    return a;
}

inline json to_json(const ProblemParams& P)
{
    return {{"N", P.N}, {"s", num(P.s)}, {"alpha", num(P.alpha)}, {"beta", num(P.beta)}};
}

inline json to_json(const ExponentPair& e) { return {{"p", num(e.p)}, {"q", num(e.q)}}; }

inline json to_json(const AdmissibilityReport& r)
{
    json conds = json::array();
    for (const auto& c : r.conditions)
        conds.push_back({{"name", c.name}, {"pass", c.pass}, {"margin", num(c.margin)}});
    json failed = json::array();
    for (const auto& n : r.failed())
        failed.push_back(n);
    return {{"params", to_json(r.params)},
            {"pair", to_json(r.pair)},
            {"t", num(r.t)},
            {"t_range", {{"lo", num(r.t_range.lo)}, {"hi", num(r.t_range.hi)}}},
            {"gap", num(r.gap)},
            {"admissible", r.admissible()},
            {"failed", failed},
            {"conditions", conds}};
}

inline json to_json(const Field& f)
{
    return {{"domain", std::string(to_string(f.basis->domain().kind))},
            {"basis", f.basis->kind()},
            {"M", f.basis->size()},
            {"coefficients", to_json(f.coefficients)}};
}

inline Field field_from_json(const json& j, const BasisPtr& basis)
{
    const auto& a = j.at("coefficients");
    Eigen::VectorXd c(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
        c[static_cast<Eigen::Index>(i)] = a[i].get<double>();
    if (j.at("M").get<std::size_t>() != basis->size())
        throw Error(Errc::BasisMismatch, "stored field has a different basis size");
    return Field(basis, c);
}

inline json to_json(const EnergyReport& e)
{
    return {{"Q", num(e.Q)}, {"H_integral", num(e.H_integral)}, {"J", num(e.J)},
            {"residual_sup", num(e.residual_sup)}, {"residual_dual", num(e.residual_dual)}};
}

inline json to_json(const SolveResult& r)
{
    return {{"converged", r.converged},
            {"trivial", r.trivial},
            {"status", r.status},
            {"params", to_json(r.pair.params)},
            {"pair", to_json(r.pair.pair)},
            {"t", num(r.pair.t)},
            {"iterations", {{"power", r.iter_power}, {"newton", r.iter_newton}}},
            {"kappa", num(r.kappa)},
            {"positivity_min", num(r.positivity_min)},
            {"sup_u", num(r.sup_u)},
            {"theta_norm_u", num(r.theta_norm_u)},
            {"energy", to_json(r.energy)},
            {"u", to_json(r.pair.u)},
            {"v", to_json(r.pair.v)}};
}

inline json to_json(const OperatorSummary& s)
{
    json m = json::array();
    for (double x : s.first_multipliers)
        m.push_back(num(x));
    json j = {{"kind", to_string(s.kind)}, {"s", num(s.s)}, {"size", s.size}};
    if (s.grid_n > 0)
        j["grid_n"] = s.grid_n;
    j["first_multipliers"] = m;
    return j;
}

inline json to_json(const EigenvalueComparison& c)
{
    return {{"s", num(c.s)}, {"n", c.n}, {"mu1_restricted", num(c.mu1)}, {"mu1_restricted_2n", num(c.mu1_fine)},
            {"lambda1_s_spectral", num(c.lambda1_s)}, {"margin", num(c.margin)}, {"strict", c.strict}};
}

inline json to_json(const DominationReport& d)
{
    return {{"s", num(d.s)}, {"n", d.n}, {"min_difference", num(d.min_difference)}, {"argmin_x", num(d.argmin_x)}};
}

inline json to_json(const StepRecord& r)
{
    return {{"gamma", num(r.gamma)}, {"tau", num(r.tau)}, {"theta", num(r.theta)}, {"eta", num(r.eta)},
            {"delta", num(r.delta)}};
}

inline json to_json(const BootstrapChain& ch)
{
    json steps = json::array();
    for (const auto& s : ch.steps)
        steps.push_back(to_json(s));
    return {{"params", to_json(ch.params)},
            {"pair", to_json(ch.pair)},
            {"t", num(ch.t)},
            {"start_gamma", num(ch.start_gamma)},
            {"branch", to_string(ch.ranges.branch)},
            {"c_sup", num(ch.ranges.c_sup)},
            {"d_sup", num(ch.ranges.d_sup)},
            {"c_unbounded", ch.ranges.c_unbounded},
            {"d_unbounded", ch.ranges.d_unbounded},
            {"rho_a", num(ch.ranges.powers.rho_a)},
            {"rho_b", num(ch.ranges.powers.rho_b)},
            {"c", num(ch.c)},
            {"d", num(ch.d)},
            {"terminal", to_string(ch.terminal)},
            {"steps", steps}};
}

inline json to_json(const SweepRow& r)
{
    return {{"theta", num(r.theta)}, {"p", num(r.p)}, {"q", num(r.q)}, {"gap", num(r.gap)},
            {"sup_u", num(r.sup_u)}, {"theta_norm_u", num(r.theta_norm_u)}, {"J", num(r.J)},
            {"iter_power", r.iter_power}, {"iter_newton", r.iter_newton}, {"converged", r.converged},
            {"warm_start", r.warm}, {"status", r.status}};
}

} // namespace fle
