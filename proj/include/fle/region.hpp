#pragma once

// Sampled critical hyperbole, pq = 1 curve, asymptotes and intersection marker
// of the (p, q) existence region, with a dependency-free SVG rendering.

#include "fle/error.hpp"
#include "fle/exponents.hpp"
#include "fle/io.hpp"

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fle {

struct RegionSample {
    double p;
    std::optional<double> q_critical; ///< absent left of the vertical asymptote
    double q_pq1;                     ///< 1/p
};

struct RegionData {
    ProblemParams params;
    Asymptotes asym;
    std::optional<PqPoint> intersection;
    bool degenerate = false; ///< alpha = 2s, no finite intersection
    std::vector<RegionSample> samples;
};

inline RegionData sample_region(const ProblemParams& P, int samples, double p_min, double p_max)
{
    P.validate();
    if (samples < 2 || !(p_min > 0.0) || !(p_max > p_min))
        throw Error(Errc::InvalidArgument, "region needs samples >= 2 and 0 < p_min < p_max");
    RegionData r;
    r.params = P;
    r.asym = asymptotes(P);
    try {
        r.intersection = pq1_intersection(P);
    } catch (const Error& e) {
        if (e.code() != Errc::DegenerateWeight)
            throw;
        r.degenerate = true;
    }
    const double lr = std::log(p_max / p_min);
    for (int i = 0; i < samples; ++i) {
        const double p = i == samples - 1 ? p_max : p_min * std::exp(lr * i / (samples - 1));
        r.samples.push_back({p, critical_q_of_p(P, p), 1.0 / p});
    }
    return r;
}

inline std::string region_csv(const RegionData& r)
{
    std::string out = "p,q_critical,q_pq1\n";
    for (const auto& s : r.samples)
        out += format_number(s.p) + "," + (s.q_critical ? format_number(*s.q_critical) : std::string("nan")) + ","
            + format_number(s.q_pq1) + "\n";
    return out;
}

/// Plot window [0, L]^2 with L chosen to show the asymptotes and the marker.
inline std::string region_svg(const RegionData& r, const std::string& title)
{
    double L = 4.0;
    L = std::max({L, 2.0 * r.asym.p_vertical, 2.0 * r.asym.q_horizontal});
    if (r.intersection)
        L = std::max({L, 1.5 * r.intersection->p, 1.5 * r.intersection->q});
    const double W = 480.0, pad = 40.0;
    auto X = [&](double p) { return pad + W * p / L; };
    auto Y = [&](double q) { return pad + W * (1.0 - q / L); };
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W + 2 * pad << "\" height=\"" << W + 2 * pad
      << "\" viewBox=\"0 0 " << W + 2 * pad << ' ' << W + 2 * pad << "\">\n";
    s << "<title>" << title << "</title>\n";
    s << "<rect x=\"" << pad << "\" y=\"" << pad << "\" width=\"" << W << "\" height=\"" << W
      << "\" fill=\"white\" stroke=\"black\"/>\n";
    s << "<text x=\"" << pad + W / 2 << "\" y=\"" << 2 * pad + W - 8 << "\" text-anchor=\"middle\">p</text>\n";
    s << "<text x=\"12\" y=\"" << pad + W / 2 << "\">q</text>\n";
    s << "<text x=\"" << pad << "\" y=\"" << pad - 8 << "\">0 .. " << format_number(L) << "</text>\n";

    auto polyline = [&](const std::vector<std::pair<double, double>>& pts, const char* color, const char* id) {
        if (pts.size() < 2)
            return;
        s << "<polyline id=\"" << id << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [p, q] : pts)
            s << format_number(X(p)) << ',' << format_number(Y(q)) << ' ';
        s << "\"/>\n";
    };
    std::vector<std::pair<double, double>> hyp, inv;
    for (const auto& smp : r.samples) {
        if (smp.p > L)
            continue;
        if (smp.q_critical && *smp.q_critical >= 0.0 && *smp.q_critical <= L)
            hyp.emplace_back(smp.p, *smp.q_critical);
        if (smp.q_pq1 <= L)
            inv.emplace_back(smp.p, smp.q_pq1);
    }
    polyline(hyp, "crimson", "critical-hyperbole");
    polyline(inv, "steelblue", "pq-equals-1");
    if (r.asym.p_vertical > 0.0 && r.asym.p_vertical < L)
        s << "<line id=\"vertical-asymptote\" x1=\"" << format_number(X(r.asym.p_vertical)) << "\" y1=\"" << Y(0)
          << "\" x2=\"" << format_number(X(r.asym.p_vertical)) << "\" y2=\"" << Y(L)
          << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
    if (r.asym.q_horizontal > 0.0 && r.asym.q_horizontal < L)
        s << "<line id=\"horizontal-asymptote\" x1=\"" << X(0) << "\" y1=\"" << format_number(Y(r.asym.q_horizontal))
          << "\" x2=\"" << X(L) << "\" y2=\"" << format_number(Y(r.asym.q_horizontal))
          << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
    if (r.intersection)
        s << "<circle class=\"intersection\" cx=\"" << format_number(X(r.intersection->p)) << "\" cy=\""
          << format_number(Y(r.intersection->q)) << "\" r=\"4\" fill=\"black\"/>\n";
    s << "</svg>\n";
    return s.str();
}

} // namespace fle
