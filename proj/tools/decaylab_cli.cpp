// decaylab: transform canonical decay laws of moving unstable quantum systems
// between the rest frame and a laboratory frame with fixed linear momentum.
//
// Subcommands: fit, transform, window, phi, oracle-compare. CSV/JSON formats
// and exit codes (0 ok, 2 input error, 3 numerical failure, 4 excluded
// regime) are documented in the README.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "decaylab/grid.hpp"
#include "decaylab/io.hpp"
#include "decaylab/oracle.hpp"
#include "decaylab/prony_fit.hpp"
#include "decaylab/time_map.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitExcluded = 4;

using decaylab::io::format_double;

struct GridSpec {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t n = 0;
    bool geometric = false;
};

GridSpec parse_grid(const std::string& text) {
    GridSpec g;
    std::vector<std::string> parts;
    std::string cur;
    for (char c : text) {
        if (c == ':') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    if (parts.size() < 3 || parts.size() > 4)
        throw decaylab::io::ParseError("grid: expected min:max:n[:geom]");
    try {
        g.lo = std::stod(parts[0]);
        g.hi = std::stod(parts[1]);
        g.n = static_cast<std::size_t>(std::stoul(parts[2]));
    } catch (const std::exception&) {
        throw decaylab::io::ParseError("grid: bad number in " + text);
    }
    if (parts.size() == 4) {
        if (parts[3] == "geom")
            g.geometric = true;
        else if (parts[3] == "lin")
            g.geometric = false;
        else
            throw decaylab::io::ParseError("grid: spacing must be 'geom' or 'lin'");
    }
    if (g.n < 2 || !(g.lo < g.hi)) throw decaylab::io::ParseError("grid: need n >= 2 and min < max");
    return g;
}

std::vector<double> make_grid(const GridSpec& g) {
    return g.geometric ? decaylab::geometric_grid(g.lo, g.hi, g.n)
                       : decaylab::linear_grid(g.lo, g.hi, g.n);
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw decaylab::io::ParseError("cannot open for writing: " + path);
    return os;
}

decaylab::RestModel load_model(const std::string& model_path, std::optional<double> mass_flag,
                               double ratio_max) {
    auto doc = decaylab::io::read_model_file(model_path);
    std::optional<double> mass = mass_flag ? mass_flag : doc.mass;
    if (!mass)
        throw decaylab::io::ParseError("model has no M; supply --M");
    return decaylab::RestModel(doc.modes, *mass, ratio_max);
}

int cmd_fit(const std::string& input, const std::string& out, const std::string& report_path,
            const std::string& input_kind, double mass, decaylab::FitConfig cfg) {
    std::ifstream is(input);
    if (!is) {
        std::cerr << "fit: cannot open " << input << "\n";
        return kExitInput;
    }
    decaylab::SurvivalCurve curve = [&] {
        auto raw = decaylab::io::read_curve_csv(is);
        if (input_kind == "modulus") return raw;
        // probability input: fit target is the modulus sqrt(P0)
        std::vector<decaylab::SurvivalCurve::Sample> s;
        for (const auto& q : raw.samples()) s.push_back({q.t, std::sqrt(q.v)});
        return decaylab::SurvivalCurve(std::move(s));
    }();

    std::optional<double> mass_opt;
    if (mass > 0.0) mass_opt = mass;

    decaylab::FitResult result = [&] {
        try {
            return decaylab::fit_prony(curve, cfg);
        } catch (const decaylab::FitError& e) {
            std::cerr << "fit: " << e.what() << " (best-so-far written)\n";
            decaylab::io::write_model_file(out, e.best().modes, mass_opt);
            std::exit(kExitNumerical);
        }
    }();

    decaylab::io::write_model_file(out, result.modes, mass_opt);

    nlohmann::json rep;
    rep["rmse"] = result.report.rmse;
    rep["converged"] = result.report.converged;
    rep["best_restart"] = result.report.best_restart;
    rep["restart_rmse"] = result.report.restart_rmse;
    rep["evaluations"] = result.report.evaluations;
    rep["modes"] = result.modes.size();
    if (mass_opt) {
        rep["width_mass_ratio"] = result.modes.gamma_max() / *mass_opt;
        rep["smallness_ok"] = decaylab::RestModel::smallness_holds(result.modes, *mass_opt);
        if (!rep["smallness_ok"].get<bool>())
            std::cerr << "fit: warning: Gamma_N/M = " << rep["width_mass_ratio"].get<double>()
                      << " violates the smallness assumption\n";
    }
    if (report_path.empty()) {
        std::cout << rep.dump(2) << "\n";
    } else {
        open_out(report_path) << rep.dump(2) << "\n";
    }
    return kExitOk;
}

int cmd_transform(const std::string& model_path, std::optional<double> mass_flag, double p,
                  const GridSpec& grid, const std::string& out, bool clamp, double ratio_max) {
    const auto model = load_model(model_path, mass_flag, ratio_max);
    const decaylab::LabContext ctx(model, p);
    decaylab::LabOptions opt;
    opt.clamp = clamp;
    auto os = open_out(out);
    os << "# decaylab transform\n";
    os << "# p = " << format_double(p) << ", M = " << format_double(model.mass())
       << ", gamma = " << format_double(ctx.gamma) << "\n";
    os << "t,P_p,P_0,gamma,warn\n";
    for (double t : make_grid(grid)) {
        const auto lab = decaylab::survival_probability_lab(model, ctx, t, opt);
        const double rest = decaylab::survival_probability_rest(model.modes(), t);
        os << format_double(t) << ',' << format_double(lab.value) << ',' << format_double(rest)
           << ',' << format_double(ctx.gamma) << ',' << (lab.in_validity ? 0 : 1) << '\n';
    }
    return kExitOk;
}

int cmd_window(const std::string& model_path, std::optional<double> mass_flag, double p,
               double dominance_factor, double zeta_threshold, const std::string& out,
               double ratio_max) {
    const auto model = load_model(model_path, mass_flag, ratio_max);
    const decaylab::LabContext ctx(model, p);
    const auto bounds = decaylab::solve_zeta_bounds(zeta_threshold);
    const auto rep = decaylab::exponential_window(model, ctx, bounds, dominance_factor);
    const auto j = decaylab::io::window_report_to_json(rep);
    if (out.empty())
        std::cout << j.dump(2) << "\n";
    else
        open_out(out) << j.dump(2) << "\n";
    return kExitOk;
}

int cmd_phi(const std::string& model_path, std::optional<double> mass_flag, double p,
            const GridSpec& grid, const std::string& out, double ratio_max,
            double dominance_factor, double zeta_threshold) {
    const auto model = load_model(model_path, mass_flag, ratio_max);
    const decaylab::LabContext ctx(model, p);

    decaylab::IntervalSet window;
    if (p > 0.0) {
        try {
            window = decaylab::exponential_window(model, ctx,
                                                  decaylab::solve_zeta_bounds(zeta_threshold),
                                                  dominance_factor)
                         .window_lab;
        } catch (const decaylab::ExcludedRegimeError&) {
        }
    }

    auto os = open_out(out);
    os << "# decaylab phi\n";
    os << "# p = " << format_double(p) << ", M = " << format_double(model.mass())
       << ", gamma = " << format_double(ctx.gamma) << "\n";
    os << "t,phi,t_over_gamma,deviation,flag\n";

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, n = 0.0;
    double max_dev = 0.0, sum_dev = 0.0;
    for (double t : make_grid(grid)) {
        int flag = 0;
        double phi = std::numeric_limits<double>::quiet_NaN();
        try {
            const auto r = decaylab::phi_p(model, ctx, t);
            phi = r.value;
            if (r.clamped)
                flag = 2;
            else if (!r.in_validity)
                flag = 1;
        } catch (const decaylab::DomainError&) {
            flag = 3;  // P_p outside (0, 1]; row flagged, run continues
        }
        const double dev = std::isnan(phi) ? std::numeric_limits<double>::quiet_NaN()
                                           : phi * ctx.gamma / t - 1.0;
        os << format_double(t) << ',' << format_double(phi) << ',' << format_double(t / ctx.gamma)
           << ',' << format_double(dev) << ',' << flag << '\n';
        const bool in_window = window.empty() ? flag == 0 : (flag == 0 && window.contains(t));
        if (in_window) {
            sx += t;
            sy += phi;
            sxx += t * t;
            sxy += t * phi;
            n += 1.0;
            max_dev = std::max(max_dev, std::abs(dev));
            sum_dev += std::abs(dev);
        }
    }
    if (n >= 2.0) {
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        if (window.empty())
            os << "# linearity: window empty or unavailable; diagnostics cover all valid rows\n";
        os << "# linearity: points_in_window = " << static_cast<std::size_t>(n) << "\n";
        os << "# linearity: max_deviation = " << format_double(max_dev) << "\n";
        os << "# linearity: mean_deviation = " << format_double(sum_dev / n) << "\n";
        os << "# linearity: slope = " << format_double(slope) << "\n";
        os << "# linearity: slope_times_gamma_minus_1 = "
           << format_double(slope * ctx.gamma - 1.0) << "\n";
    } else {
        os << "# linearity: unavailable (no in-window points)\n";
    }
    return kExitOk;
}

int cmd_oracle_compare(const std::string& model_path, std::optional<double> mass_flag, double p,
                       const GridSpec& grid, const std::string& out, double rel_tol,
                       double ratio_max, double dominance_factor, double zeta_threshold) {
    const auto model = load_model(model_path, mass_flag, ratio_max);
    const decaylab::LabContext ctx(model, p);
    decaylab::oracle::QuadratureConfig qcfg;
    qcfg.rel_tol = rel_tol;
    const decaylab::oracle::MddSpec mdd =
        decaylab::oracle::LorentzianSumMdd{model.modes(), model.mass()};

    decaylab::IntervalSet window;
    if (p > 0.0) {
        try {
            window = decaylab::exponential_window(model, ctx,
                                                  decaylab::solve_zeta_bounds(zeta_threshold),
                                                  dominance_factor)
                         .window_lab;
        } catch (const decaylab::ExcludedRegimeError&) {
        }
    }

    auto os = open_out(out);
    os << "# decaylab oracle-compare\n";
    os << "# p = " << format_double(p) << ", M = " << format_double(model.mass())
       << ", gamma = " << format_double(ctx.gamma) << "\n";
    os << "t,closed_form,oracle,rel_diff,in_regime,err_bound\n";

    double max_rel = 0.0;
    std::size_t in_regime_rows = 0;
    for (double t : make_grid(grid)) {
        const auto lab = decaylab::survival_probability_lab(model, ctx, t);
        double oracle_p = std::numeric_limits<double>::quiet_NaN();
        double err = std::numeric_limits<double>::quiet_NaN();
        int regime = 0;
        try {
            const auto a = decaylab::oracle::amplitude_lab_oracle(mdd, p, t, qcfg);
            oracle_p = std::norm(a.value);
            err = a.error_bound;
            regime = p > 0.0 ? (window.contains(t) && p * t >= 1e3 ? 1 : 0)
                             : (lab.in_validity ? 1 : 0);
        } catch (const decaylab::PrecisionError& e) {
            oracle_p = std::norm(e.achieved());
            err = e.error_bound();
            regime = 0;  // flagged row with achieved error; excluded from summary
        }
        const double rel = std::abs(lab.value - oracle_p) / oracle_p;
        os << format_double(t) << ',' << format_double(lab.value) << ','
           << format_double(oracle_p) << ',' << format_double(rel) << ',' << regime << ','
           << format_double(err) << '\n';
        if (regime == 1) {
            ++in_regime_rows;
            max_rel = std::max(max_rel, rel);
        }
    }
    os << "# summary: rows_in_regime = " << in_regime_rows << "\n";
    os << "# summary: max_rel_diff_in_regime = " << format_double(max_rel) << "\n";
    std::cout << "max_rel_diff_in_regime = " << format_double(max_rel) << " over "
              << in_regime_rows << " rows\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"decay-law frame transformation toolkit"};
    app.require_subcommand(1);

    // fit
    auto* fit = app.add_subcommand("fit", "fit an exponential-mode sum to a sampled decay curve");
    std::string fit_input, fit_out = "model.json", fit_report, fit_kind = "probability";
    double fit_mass = 0.0, fit_tol = 1e-14;
    decaylab::FitConfig fit_cfg;
    fit->add_option("--input", fit_input, "input CSV (t,value)")->required();
    fit->add_option("--out", fit_out, "output mode-set JSON");
    fit->add_option("--report", fit_report, "fit report JSON (default: stdout)");
    fit->add_option("--input-kind", fit_kind, "probability|modulus (default probability)")
        ->check(CLI::IsMember({"probability", "modulus"}));
    fit->add_option("--modes", fit_cfg.modes, "mode count N")->required();
    fit->add_option("--restarts", fit_cfg.restarts, "Monte Carlo restarts");
    fit->add_option("--seed", fit_cfg.seed, "RNG seed");
    fit->add_option("--max-iters", fit_cfg.max_iters, "evaluation budget per restart");
    fit->add_option("--tol", fit_tol, "simplex convergence tolerance");
    fit->add_option("--M", fit_mass, "resonance mass to store with the model");

    // transform
    auto* tr = app.add_subcommand("transform", "evaluate P_p(t) and P_0(t) over a grid");
    std::string tr_model, tr_out = "transform.csv", tr_grid = "3:20:150";
    double tr_p = 0.0, tr_mass = -1.0, tr_ratio_max = decaylab::RestModel::kDefaultRatioMax;
    bool tr_clamp = false;
    tr->add_option("--model", tr_model, "mode-set JSON")->required();
    tr->add_option("--p", tr_p, "linear momentum")->required();
    tr->add_option("--M", tr_mass, "resonance mass (overrides model file)");
    tr->add_option("--grid", tr_grid, "min:max:n[:geom]");
    tr->add_option("--out", tr_out, "output CSV");
    tr->add_flag("--clamp", tr_clamp, "clamp P_p into [0,1]");
    tr->add_option("--ratio-max", tr_ratio_max, "allowed Gamma_N/M");

    // window
    auto* wd = app.add_subcommand("window", "estimate the exponential-time window");
    std::string wd_model, wd_out;
    double wd_p = 0.0, wd_mass = -1.0, wd_dom = 1e-2, wd_thr = 1e-2,
           wd_ratio_max = decaylab::RestModel::kDefaultRatioMax;
    wd->add_option("--model", wd_model, "mode-set JSON")->required();
    wd->add_option("--p", wd_p, "linear momentum")->required();
    wd->add_option("--M", wd_mass, "resonance mass (overrides model file)");
    wd->add_option("--dominance-factor", wd_dom, "margin on the xi cut (default 1e-2)");
    wd->add_option("--zeta-threshold", wd_thr, "threshold for K(zeta) (default 1e-2)");
    wd->add_option("--out", wd_out, "output JSON (default: stdout)");
    wd->add_option("--ratio-max", wd_ratio_max, "allowed Gamma_N/M");

    // phi
    auto* ph = app.add_subcommand("phi", "evaluate the time-transformation map phi_p(t)");
    std::string ph_model, ph_out = "phi.csv", ph_grid = "10:700:200";
    double ph_p = 0.0, ph_mass = -1.0, ph_ratio_max = decaylab::RestModel::kDefaultRatioMax;
    double ph_dom = 1e-2, ph_thr = 1e-2;
    ph->add_option("--model", ph_model, "mode-set JSON")->required();
    ph->add_option("--p", ph_p, "linear momentum")->required();
    ph->add_option("--M", ph_mass, "resonance mass (overrides model file)");
    ph->add_option("--grid", ph_grid, "min:max:n[:geom]");
    ph->add_option("--out", ph_out, "output CSV");
    ph->add_option("--ratio-max", ph_ratio_max, "allowed Gamma_N/M");
    ph->add_option("--dominance-factor", ph_dom, "margin on the xi cut for the window footer");
    ph->add_option("--zeta-threshold", ph_thr, "threshold for K(zeta)");

    // oracle-compare
    auto* oc = app.add_subcommand("oracle-compare",
                                  "closed form vs direct quadrature of the exact integral");
    std::string oc_model, oc_out = "oracle.csv", oc_grid = "1000:20000:12:geom";
    double oc_p = 0.0, oc_mass = -1.0, oc_tol = 1e-8,
           oc_ratio_max = decaylab::RestModel::kDefaultRatioMax;
    double oc_dom = 1e-2, oc_thr = 1e-2;
    oc->add_option("--model", oc_model, "mode-set JSON")->required();
    oc->add_option("--p", oc_p, "linear momentum")->required();
    oc->add_option("--M", oc_mass, "resonance mass (overrides model file)");
    oc->add_option("--grid", oc_grid, "min:max:n[:geom]");
    oc->add_option("--out", oc_out, "output CSV");
    oc->add_option("--tol", oc_tol, "oracle relative tolerance");
    oc->add_option("--ratio-max", oc_ratio_max, "allowed Gamma_N/M");
    oc->add_option("--dominance-factor", oc_dom, "margin on the xi cut for the regime column");
    oc->add_option("--zeta-threshold", oc_thr, "threshold for K(zeta)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*fit) {
            fit_cfg.tolerance = fit_tol;
            return cmd_fit(fit_input, fit_out, fit_report, fit_kind, fit_mass, fit_cfg);
        }
        if (*tr)
            return cmd_transform(tr_model,
                                 tr_mass > 0.0 ? std::optional<double>(tr_mass) : std::nullopt,
                                 tr_p, parse_grid(tr_grid), tr_out, tr_clamp, tr_ratio_max);
        if (*wd)
            return cmd_window(wd_model,
                              wd_mass > 0.0 ? std::optional<double>(wd_mass) : std::nullopt, wd_p,
                              wd_dom, wd_thr, wd_out, wd_ratio_max);
        if (*ph)
            return cmd_phi(ph_model, ph_mass > 0.0 ? std::optional<double>(ph_mass) : std::nullopt,
                           ph_p, parse_grid(ph_grid), ph_out, ph_ratio_max, ph_dom, ph_thr);
        if (*oc)
            return cmd_oracle_compare(
                oc_model, oc_mass > 0.0 ? std::optional<double>(oc_mass) : std::nullopt, oc_p,
                parse_grid(oc_grid), oc_out, oc_tol, oc_ratio_max, oc_dom, oc_thr);
    } catch (const decaylab::io::ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const decaylab::ExcludedRegimeError& e) {
        std::cerr << "excluded regime: " << e.what() << "\n";
        return kExitExcluded;
    } catch (const decaylab::PrecisionError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const decaylab::FitError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const decaylab::DomainError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitOk;
}
