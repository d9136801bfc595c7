#pragma once

// File formats: survival curves as `t,value` CSV (comment lines start with
// '#', extra columns ignored on read), mode sets as JSON documents
// {"M": <real|null>, "modes": [{"w":..., "gamma":...}, ...]} sorted by gamma,
// window reports and linearity diagnostics as JSON.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "decaylab/exp_modes.hpp"
#include "decaylab/time_map.hpp"
#include "decaylab/windows.hpp"

namespace decaylab::io {

using json = nlohmann::json;

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---- SurvivalCurve CSV ----

inline void write_curve_csv(std::ostream& os, const SurvivalCurve& curve) {
    os << "t,value\n";
    for (const auto& s : curve.samples())
        os << format_double(s.t) << ',' << format_double(s.v) << '\n';
}

inline SurvivalCurve read_curve_csv(std::istream& is) {
    std::vector<SurvivalCurve::Sample> samples;
    std::string line;
    bool header_seen = false;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            if (!line.empty() && !(line[0] >= '0' && line[0] <= '9') && line[0] != '-' &&
                line[0] != '+' && line[0] != '.')
                continue;  // header row
        }
        std::istringstream row(line);
        std::string tf, vf;
        if (!std::getline(row, tf, ',') || !std::getline(row, vf, ','))
            throw ParseError("curve CSV: line " + std::to_string(lineno) + ": need two columns");
        try {
            std::size_t pos = 0;
            const double t = std::stod(tf, &pos);
            const double v = std::stod(vf);
            (void)pos;
            samples.push_back({t, v});
        } catch (const std::exception&) {
            throw ParseError("curve CSV: line " + std::to_string(lineno) + ": bad number");
        }
    }
    if (samples.size() < 2) throw ParseError("curve CSV: need at least two data rows");
    try {
        return SurvivalCurve(std::move(samples));
    } catch (const DomainError& e) {
        throw ParseError(std::string("curve CSV: ") + e.what());
    }
}

// ---- ExpModeSet JSON ----

struct ModelDocument {
    ExpModeSet modes;
    std::optional<double> mass;
};

inline json mode_set_to_json(const ExpModeSet& modes, std::optional<double> mass) {
    json j;
    j["M"] = mass ? json(*mass) : json(nullptr);
    j["modes"] = json::array();
    for (const auto& m : modes.modes()) j["modes"].push_back({{"w", m.w}, {"gamma", m.gamma}});
    return j;
}

inline ModelDocument mode_set_from_json(const json& j) {
    if (!j.contains("modes") || !j["modes"].is_array())
        throw ParseError("model JSON: missing \"modes\" array");
    std::vector<ExpMode> modes;
    for (const auto& e : j["modes"]) {
        if (!e.contains("w") || !e.contains("gamma"))
            throw ParseError("model JSON: each mode needs \"w\" and \"gamma\"");
        modes.push_back({e["w"].get<double>(), e["gamma"].get<double>()});
    }
    std::sort(modes.begin(), modes.end(),
              [](const ExpMode& a, const ExpMode& b) { return a.gamma < b.gamma; });
    double wsum = 0.0;
    for (const auto& m : modes) wsum += m.w;
    if (std::abs(wsum - 1.0) > 1e-9)
        throw ParseError("model JSON: weights must sum to 1 within 1e-9");
    for (auto& m : modes) m.w /= wsum;  // renormalize residual rounding

    std::optional<double> mass;
    if (j.contains("M") && !j["M"].is_null()) mass = j["M"].get<double>();
    try {
        return {ExpModeSet(std::move(modes)), mass};
    } catch (const DomainError& e) {
        throw ParseError(std::string("model JSON: ") + e.what());
    }
}

inline void write_model_file(const std::string& path, const ExpModeSet& modes,
                             std::optional<double> mass) {
    std::ofstream os(path);
    if (!os) throw ParseError("cannot open for writing: " + path);
    os << mode_set_to_json(modes, mass).dump(2) << '\n';
}

inline ModelDocument read_model_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ParseError("cannot open model file: " + path);
    json j;
    try {
        is >> j;
    } catch (const std::exception& e) {
        throw ParseError(std::string("model JSON: ") + e.what());
    }
    return mode_set_from_json(j);
}

// ---- WindowReport JSON ----

inline json interval_set_to_json(const IntervalSet& set) {
    json arr = json::array();
    for (const auto& iv : set.intervals()) arr.push_back({iv.lo, iv.hi});
    return arr;
}

inline json window_report_to_json(const WindowReport& rep) {
    json j;
    j["gamma"] = rep.gamma;
    j["zeta_min"] = rep.bounds.zeta_min;
    j["zeta_max"] = rep.bounds.zeta_max;
    j["threshold"] = rep.bounds.threshold;
    j["dominance_factor"] = rep.dominance_factor;
    j["dominant_indices"] = rep.dominant_indices;
    j["xi"] = rep.xi;
    j["I_p"] = interval_set_to_json(rep.window_lab);
    j["I_0"] = interval_set_to_json(rep.window_rest);
    j["closed_interval"] = rep.closed_interval;
    if (!rep.dominant_indices.empty()) {
        j["margins"] = {{"pt", rep.margins.pt_margin},
                        {"ten_gamma1_t", rep.margins.t_gamma1_margin},
                        {"Mt", rep.margins.mt_margin}};
        j["constraints_satisfied"] = {{"pt", rep.margins.pt_ok},
                                      {"t_gamma1", rep.margins.t_gamma1_ok},
                                      {"Mt", rep.margins.mt_ok}};
    } else {
        j["empty_window_diagnostics"] = {{"min_failing_xi", rep.min_failing_xi},
                                         {"admitting_dominance_factor", rep.admitting_dominance_factor}};
    }
    return j;
}

inline json linearity_report_to_json(const LinearityReport& rep) {
    json j;
    j["max_deviation"] = rep.max_deviation;
    j["mean_deviation"] = rep.mean_deviation;
    j["slope"] = rep.slope;
    j["slope_deviation"] = rep.slope_deviation;
    j["grid"] = rep.grid;
    j["phi"] = rep.phi;
    j["deviations"] = rep.deviations;
    return j;
}

}  // namespace decaylab::io
