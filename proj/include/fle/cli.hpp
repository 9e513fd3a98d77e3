#pragma once

// Batch commands behind the `fle` executable. Each command reads a RunConfig,
// writes its artifacts into the output directory (write-then-rename) and
// returns a documented exit code.

#include "fle/basis.hpp"
#include "fle/battery.hpp"
#include "fle/bootstrap.hpp"
#include "fle/energy.hpp"
#include "fle/error.hpp"
#include "fle/exponents.hpp"
#include "fle/io.hpp"
#include "fle/operators.hpp"
#include "fle/region.hpp"
#include "fle/serialize.hpp"
#include "fle/solver.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#ifndef FLE_VERSION
#define FLE_VERSION "0.1.0"
#endif

namespace fle::cli {

enum ExitCode : int { Ok = 0, Semantic = 1, Parse = 2, Convergence = 3, Positivity = 4 };

/// Every key a configuration may contain, with its default.
inline json default_config()
{
    return json::parse(R"({
  "problem": {"N": 1, "s": 0.25, "alpha": 0.0, "beta": 0.0, "p": 2.0, "q": 2.0, "t": 0.25},
  "operator": "spectral",
  "domain": "interval",
  "solver": {
    "M": 64, "tol_fix": 1e-12, "tol_res": 1e-10, "max_power_iter": 2000, "max_newton_iter": 50,
    "damping": 1.0, "smoothing_eps": [1e-2, 1e-4, 1e-6, 1e-8, 1e-10], "min_norm": 1e-8,
    "grid_n": 512, "positivity_grid": 2001,
    "rule": {"panels": 32, "order": 12, "grading": 2.0, "max_width": 0.03125}
  },
  "output": {"field_samples": 201},
  "region": {"samples": 200, "p_min": 0.01, "p_max": 100.0},
  "sweep": {"ray_p": 2.0, "ray_q": 2.0, "thetas": [1.0, 1.05, 1.1, 1.15, 1.2, 1.25, 1.3, 1.35, 1.4, 1.45]},
  "ops_compare": {"n": 512, "s_values": []},
  "bootstrap": {"start_gamma": 2.0, "max_steps": 20}
})");
}

struct RunConfig {
    json doc; ///< effective configuration, echoed into artifacts
    ProblemParams params;
    ExponentPair pair;
    double t = 0.25;
    OperatorKind op_kind = OperatorKind::Spectral;
    Domain domain;
    SolverConfig solver;
    int field_samples = 201;
    int region_samples = 200;
    double region_p_min = 0.01, region_p_max = 100.0;
    ExponentPair ray;
    std::vector<double> thetas;
    int ops_n = 512;
    std::vector<double> ops_s;
    double start_gamma = 2.0;
    int max_steps = 20;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

/// Rejects keys that are not in the default document (catches typos).
inline void check_keys(const json& given, const json& ref, const std::string& prefix)
{
    for (auto it = given.begin(); it != given.end(); ++it) {
        const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
        if (!ref.contains(it.key()))
            throw ConfigError("unknown configuration key '" + key + "'");
        if (it.value().is_object() && ref[it.key()].is_object())
            check_keys(it.value(), ref[it.key()], key);
    }
}

inline void set_dotted(json& doc, const std::string& path, const json& value)
{
    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (key.empty())
            throw ConfigError("malformed key '" + path + "'");
        if (dot == std::string::npos) {
            (*node)[key] = value;
            return;
        }
        json& next = (*node)[key];
        if (!next.is_object())
            next = json::object();
        node = &next;
        start = dot + 1;
    }
}

template <class T>
T get(const json& j, const char* a, const char* b = nullptr)
{
    const json& v = b ? j.at(a).at(b) : j.at(a);
    try {
        return v.get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("configuration key '") + a + (b ? std::string(".") + b : "") + "' has the wrong type");
    }
}

} // namespace detail

/// Defaults, then the config file (if any), then --set key=value overrides.
/// Values that parse as JSON are taken as JSON, anything else as a string.
inline RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides)
{
    json doc = default_config();
    const json ref = doc;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in)
            throw ConfigError("cannot read config file '" + path + "'");
        json user;
        try {
            user = json::parse(in);
        } catch (const json::exception& e) {
            throw ConfigError(std::string("config parse error: ") + e.what());
        }
        if (!user.is_object())
            throw ConfigError("config must be a JSON object");
        detail::check_keys(user, ref, "");
        doc.merge_patch(user);
    }
    for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigError("--set expects key=value, got '" + kv + "'");
        const std::string key = kv.substr(0, eq), text = kv.substr(eq + 1);
        json value;
        try {
            value = json::parse(text);
        } catch (const json::exception&) {
            value = text;
        }
        json probe = json::object();
        detail::set_dotted(probe, key, value);
        detail::check_keys(probe, ref, "");
        detail::set_dotted(doc, key, value);
    }

    RunConfig rc;
    rc.doc = doc;
    using detail::get;
    const json& pr = doc.at("problem");
    rc.params.N = get<int>(pr, "N");
    rc.params.s = get<double>(pr, "s");
    rc.params.alpha = get<double>(pr, "alpha");
    rc.params.beta = get<double>(pr, "beta");
    rc.pair = {get<double>(pr, "p"), get<double>(pr, "q")};
    rc.t = get<double>(pr, "t");
    try {
        rc.op_kind = parse_operator_kind(get<std::string>(doc, "operator"));
        rc.domain = parse_domain(get<std::string>(doc, "domain"));
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }

    const json& sv = doc.at("solver");
    rc.solver.M = get<std::size_t>(sv, "M");
    rc.solver.tol_fix = get<double>(sv, "tol_fix");
    rc.solver.tol_res = get<double>(sv, "tol_res");
    rc.solver.max_power_iter = get<int>(sv, "max_power_iter");
    rc.solver.max_newton_iter = get<int>(sv, "max_newton_iter");
    rc.solver.damping = get<double>(sv, "damping");
    rc.solver.smoothing_eps = get<std::vector<double>>(sv, "smoothing_eps");
    rc.solver.min_norm = get<double>(sv, "min_norm");
    rc.solver.grid_n = get<int>(sv, "grid_n");
    rc.solver.positivity_grid = get<int>(sv, "positivity_grid");
    const json& ru = sv.at("rule");
    rc.solver.rule.panels = get<int>(ru, "panels");
    rc.solver.rule.order = get<int>(ru, "order");
    rc.solver.rule.grading = get<double>(ru, "grading");
    rc.solver.rule.max_width = get<double>(ru, "max_width");

    rc.field_samples = get<int>(doc, "output", "field_samples");
    rc.region_samples = get<int>(doc, "region", "samples");
    rc.region_p_min = get<double>(doc, "region", "p_min");
    rc.region_p_max = get<double>(doc, "region", "p_max");
    rc.ray = {get<double>(doc, "sweep", "ray_p"), get<double>(doc, "sweep", "ray_q")};
    rc.thetas = get<std::vector<double>>(doc, "sweep", "thetas");
    rc.ops_n = get<int>(doc, "ops_compare", "n");
    rc.ops_s = get<std::vector<double>>(doc, "ops_compare", "s_values");
    rc.start_gamma = get<double>(doc, "bootstrap", "start_gamma");
    rc.max_steps = get<int>(doc, "bootstrap", "max_steps");
    return rc;
}

/// Structural checks shared by all commands; failures are parse-level (exit 2).
/// Commands that never touch a field (region, bootstrap) skip the domain check.
inline void validate_structure(const RunConfig& rc, bool needs_domain = true)
{
    try {
        rc.params.validate();
        rc.solver.validate();
    } catch (const Error& e) {
        if (e.code() == Errc::InvalidArgument)
            throw ConfigError(e.what());
        throw;
    }
    if (needs_domain && rc.domain.dim() != rc.params.N)
        throw ConfigError("domain dimension does not match problem.N");
    if (rc.field_samples < 2 || rc.region_samples < 2)
        throw ConfigError("sample counts must be >= 2");
}

inline json envelope(const std::string& command, const RunConfig& rc)
{
    return {{"tool", {{"name", "fle"}, {"version", FLE_VERSION}}}, {"command", command}, {"config", rc.doc}};
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

struct Context {
    std::filesystem::path out;
    std::ostream* log = &std::cout;
};

inline void ensure_dir(const std::filesystem::path& p)
{
    std::error_code ec;
    std::filesystem::create_directories(p, ec);
    if (ec)
        throw Error(Errc::Io, "cannot create output directory " + p.string());
}

inline int cmd_check(const RunConfig& rc, const Context& cx)
{
    const auto rep = check_problem(rc.params, rc.pair, rc.t);
    json j = envelope("check", rc);
    j["report"] = to_json(rep);
    write_file_atomic(cx.out / "check.json", dump(j));
    *cx.log << (rep.admissible() ? "admissible" : "not admissible");
    for (const auto& n : rep.failed())
        *cx.log << ' ' << n;
    *cx.log << '\n';
    return rep.admissible() ? Ok : Semantic;
}

inline int cmd_region(const RunConfig& rc, const Context& cx)
{
    validate_structure(rc, false);
    const auto data = sample_region(rc.params, rc.region_samples, rc.region_p_min, rc.region_p_max);
    json j = envelope("region", rc);
    j["asymptotes"] = {{"p_vertical", num(data.asym.p_vertical)}, {"q_horizontal", num(data.asym.q_horizontal)}};
    j["degenerate"] = data.degenerate;
    j["intersections"] = json::array();
    if (data.intersection)
        j["intersections"].push_back({{"p", num(data.intersection->p)}, {"q", num(data.intersection->q)}});
    j["samples"] = data.samples.size();
    write_file_atomic(cx.out / "region.csv", region_csv(data));
    std::ostringstream title;
    title << "N=" << rc.params.N << " s=" << format_number(rc.params.s) << " alpha=" << format_number(rc.params.alpha)
          << " beta=" << format_number(rc.params.beta);
    write_file_atomic(cx.out / "region.svg", region_svg(data, title.str()));
    write_file_atomic(cx.out / "region.json", dump(j));
    *cx.log << "intersections " << j["intersections"].size() << '\n';
    return Ok;
}

inline std::vector<Point> field_points(const Domain& dom, int n)
{
    std::vector<Point> pts;
    if (dom.kind == DomainKind::Interval) {
        for (int i = 0; i < n; ++i)
            pts.push_back({-1.0 + 2.0 * i / (n - 1), 0.0});
    } else {
        const int m = std::max(2, static_cast<int>(std::lround(std::sqrt(double(n)))));
        for (int i = 0; i < m; ++i)
            for (int k = 0; k < m; ++k)
                pts.push_back({-1.0 + 2.0 * i / (m - 1), -1.0 + 2.0 * k / (m - 1)});
    }
    return pts;
}

inline int cmd_solve(const RunConfig& rc, const Context& cx)
{
    validate_structure(rc);
    require_regime(rc.params, rc.pair, rc.t); // before any numerics
    const auto r = solve(rc.params, rc.pair, rc.t, rc.domain, rc.op_kind, rc.solver);

    json j = envelope("solve", rc);
    j["result"] = to_json(r);
    const auto pts = field_points(rc.domain, rc.field_samples);
    const auto u = evaluate_field(r.pair.u, pts), v = evaluate_field(r.pair.v, pts);
    std::string csv = rc.domain.dim() == 1 ? "x,u,v\n" : "x,y,u,v\n";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        csv += format_number(pts[i].x) + ",";
        if (rc.domain.dim() == 2)
            csv += format_number(pts[i].y) + ",";
        csv += format_number(u[i]) + "," + format_number(v[i]) + "\n";
    }
    std::ostringstream res;
    res << "converged " << (r.converged ? "true" : "false") << "\n"
        << "status " << r.status << "\n"
        << "residual_sup " << format_number(r.energy.residual_sup) << "\n"
        << "residual_dual " << format_number(r.energy.residual_dual) << "\n"
        << "positivity_min " << format_number(r.positivity_min) << "\n"
        << "sup_u " << format_number(r.sup_u) << "\n"
        << "J " << format_number(r.energy.J) << "\n"
        << "iterations_power " << r.iter_power << "\n"
        << "iterations_newton " << r.iter_newton << "\n";
    write_file_atomic(cx.out / "field.csv", csv);
    write_file_atomic(cx.out / "residual.txt", res.str());
    write_file_atomic(cx.out / "solution.json", dump(j));
    *cx.log << res.str();
    if (!r.converged)
        return Convergence;
    if (!(r.positivity_min > 0.0))
        return Positivity;
    return Ok;
}

inline int cmd_sweep(const RunConfig& rc, const Context& cx)
{
    validate_structure(rc);
    const auto op = make_operator(rc.op_kind, rc.domain, rc.solver.M, rc.params.s, rc.solver.grid_n);
    const auto rep = sweep_to_critical(rc.params, rc.ray, rc.thetas, rc.t, op, rc.solver);
    std::string csv = "p,q,gap,sup_u,theta_norm_u,J,iter_power,iter_newton,converged\n";
    json rows = json::array();
    bool any_adm = false, any_conv = false;
    for (const auto& r : rep.rows) {
        csv += format_number(r.p) + "," + format_number(r.q) + "," + format_number(r.gap) + ","
            + format_number(r.sup_u) + "," + format_number(r.theta_norm_u) + "," + format_number(r.J) + ","
            + std::to_string(r.iter_power) + "," + std::to_string(r.iter_newton) + ","
            + (r.converged ? "true" : "false") + "\n";
        rows.push_back(to_json(r));
        if (r.status.rfind("AdmissibilityFailure", 0) == 0)
            any_adm = true;
        else if (!r.converged)
            any_conv = true;
    }
    json j = envelope("sweep", rc);
    j["rows"] = rows;
    write_file_atomic(cx.out / "sweep.csv", csv);
    write_file_atomic(cx.out / "sweep.json", dump(j));
    *cx.log << csv;
    if (any_adm)
        return Semantic;
    return any_conv ? Convergence : Ok;
}

inline int cmd_ops_compare(const RunConfig& rc, const Context& cx)
{
    // the comparison lives on the interval with its own list of orders, so the
    // problem block is not validated here
    if (rc.domain.kind != DomainKind::Interval)
        throw Error(Errc::UnsupportedKind, "ops-compare runs on the interval");
    std::vector<double> svals = rc.ops_s.empty() ? std::vector<double>{rc.params.s} : rc.ops_s;
    for (double s : svals)
        if (!(s > 0.0 && s < 1.0))
            throw ConfigError("ops-compare needs every s in (0, 1)");
    if (rc.ops_n < 16)
        throw ConfigError("ops_compare.n must be >= 16");
    json results = json::array();
    bool ok = true;
    for (double s : svals) {
        const auto cmp = compare_first_eigenvalue(rc.domain, s, rc.ops_n);
        const auto K = assemble_restricted_stiffness(rc.ops_n, s);
        json dom = json::array();
        double worst = std::numeric_limits<double>::infinity();
        auto battery = domination_battery();
        battery.push_back(bump_field());
        for (const auto& bf : battery) {
            Eigen::VectorXd u(K->n);
            for (int i = 0; i < K->n; ++i)
                u[i] = bf.f(K->node(i));
            const auto d = pointwise_domination_check(*K, u);
            worst = std::min(worst, d.min_difference);
            json e = to_json(d);
            e["field"] = bf.name;
            dom.push_back(e);
        }
        const auto spec = summarize(make_spectral(rc.domain, rc.solver.M, s));
        const auto restr = summarize(assemble_restricted(rc.domain, rc.ops_n, s, 10));
        ok = ok && cmp.strict && worst >= -1e-6;
        results.push_back({{"s", num(s)},
                           {"first_eigenvalue", to_json(cmp)},
                           {"domination_min", num(worst)},
                           {"domination", dom},
                           {"spectral", to_json(spec)},
                           {"restricted", to_json(restr)}});
        *cx.log << "s=" << format_number(s) << " mu1=" << format_number(cmp.mu1) << " lambda1^s="
                << format_number(cmp.lambda1_s) << " strict=" << (cmp.strict ? "true" : "false")
                << " domination_min=" << format_number(worst) << '\n';
    }
    json j = envelope("ops-compare", rc);
    j["results"] = results;
    write_file_atomic(cx.out / "ops_compare.json", dump(j));
    return ok ? Ok : Semantic;
}

inline int cmd_bootstrap(const RunConfig& rc, const Context& cx)
{
    validate_structure(rc, false);
    const auto ch = run_chain(rc.start_gamma, rc.params, rc.pair, rc.t, rc.max_steps);
    const auto ht = holder_trigger(rc.params);
    json j = envelope("bootstrap", rc);
    j["chain"] = to_json(ch);
    j["holder_trigger"] = {{"u_side", ht.u_side}, {"v_side", ht.v_side}, {"eligible", ht.eligible()}};
    std::string csv = "step,gamma,tau,theta,eta,delta\n";
    for (std::size_t k = 0; k < ch.steps.size(); ++k) {
        const auto& s = ch.steps[k];
        csv += std::to_string(k + 1) + "," + format_number(s.gamma) + "," + format_number(s.tau) + ","
            + format_number(s.theta) + "," + format_number(s.eta) + "," + format_number(s.delta) + "\n";
    }
    write_file_atomic(cx.out / "bootstrap.csv", csv);
    write_file_atomic(cx.out / "bootstrap.json", dump(j));
    *cx.log << csv << "terminal " << to_string(ch.terminal) << '\n';
    return ch.terminal == ChainTerminal::Linfinity ? Ok : Semantic;
}

inline int cmd_const(const RunConfig& rc, const Context& cx)
{
    if (!(rc.params.N == 1 || rc.params.N == 2) || !(rc.params.s > 0.0 && rc.params.s < 1.0))
        throw ConfigError("const needs problem.N in {1,2} and 0 < problem.s < 1");
    const double C = normalization_constant(rc.params.N, rc.params.s);
    const std::string line = format_number(C) + "\n";
    json j = envelope("const", rc);
    j["C"] = num(C);
    write_file_atomic(cx.out / "const.txt", line);
    write_file_atomic(cx.out / "const.json", dump(j));
    *cx.log << line;
    return Ok;
}

inline const std::vector<std::string>& command_names()
{
    static const std::vector<std::string> names{"check", "region", "solve", "sweep", "ops-compare", "bootstrap", "const"};
    return names;
}

inline int exit_code_for(Errc e)
{
    switch (e) {
    case Errc::InvalidArgument:
    case Errc::WeightNotIntegrable: return Parse;
    case Errc::NotConverged:
    case Errc::SingularJacobian: return Convergence;
    default: return Semantic;
    }
}

/// Loads the configuration and dispatches; all failures become exit codes.
inline int run(const std::string& command, const std::string& config_path, const std::vector<std::string>& sets,
               const std::filesystem::path& out, std::ostream& log = std::cout, std::ostream& err = std::cerr)
{
    try {
        const RunConfig rc = load_config(config_path, sets);
        ensure_dir(out);
        const Context cx{out, &log};
        if (command == "check")
            return cmd_check(rc, cx);
        if (command == "region")
            return cmd_region(rc, cx);
        if (command == "solve")
            return cmd_solve(rc, cx);
        if (command == "sweep")
            return cmd_sweep(rc, cx);
        if (command == "ops-compare")
            return cmd_ops_compare(rc, cx);
        if (command == "bootstrap")
            return cmd_bootstrap(rc, cx);
        if (command == "const")
            return cmd_const(rc, cx);
        err << "unknown command '" << command << "'\n";
        return Parse;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return Parse;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const json::exception& e) {
        err << "error: " << e.what() << '\n';
        return Parse;
    }
}

} // namespace fle::cli
