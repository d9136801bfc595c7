#pragma once

// Inversion of the rest-frame decay law and the induced time-transformation
// map phi_p(t) = P0^{-1}(P_p(t)). The inverse solves
// sum_j w_j u^(Gamma_j/Gamma_1) = sqrt(r) for u in (0, 1] (monotone, unique
// root) and maps back through t = -(2/Gamma_1) ln u.

#include <cmath>
#include <cstddef>
#include <vector>

#include "decaylab/exp_modes.hpp"
#include "decaylab/lab_frame.hpp"
#include "decaylab/windows.hpp"

namespace decaylab {

// Inverse of the rest survival probability: the time t with P0(t) = r.
inline double p0_inverse(const ExpModeSet& model, double r) {
    if (r == 0.0) throw InfiniteTimeError("p0_inverse: r = 0 needs infinite time");
    if (!(r > 0.0) || r > 1.0) throw DomainError("p0_inverse: r must lie in (0, 1]");
    if (r == 1.0) return 0.0;

    const double sqrt_r = std::sqrt(r);
    const double g1 = model.gamma_min();
    std::vector<double> expo;
    expo.reserve(model.size());
    for (const auto& m : model.modes()) expo.push_back(m.gamma / g1);

    const auto g = [&](double u) {
        const double lu = std::log(u);
        double s = 0.0;
        for (std::size_t j = 0; j < expo.size(); ++j) {
            const double e = expo[j] * lu;
            s += model[j].w * (e < -745.0 ? 0.0 : std::exp(e));
        }
        return s - sqrt_r;
    };
    const auto dg = [&](double u) {
        const double lu = std::log(u);
        double s = 0.0;
        for (std::size_t j = 0; j < expo.size(); ++j) {
            const double e = (expo[j] - 1.0) * lu;
            s += model[j].w * expo[j] * (e < -745.0 ? 0.0 : std::exp(e));
        }
        return s;
    };

    // bisection on (0, 1], Newton once the bracket is tight
    double lo = 0.0, hi = 1.0;
    double u = sqrt_r;  // exact for N = 1
    if (g(u) != 0.0) {
        while (hi - lo > 1e-3) {
            const double mid = 0.5 * (lo + hi);
            (g(mid) < 0.0 ? lo : hi) = mid;
        }
        u = 0.5 * (lo + hi);
        for (int it = 0; it < 100; ++it) {
            const double fu = g(u);
            if (fu == 0.0) break;
            (fu < 0.0 ? lo : hi) = u;
            const double d = dg(u);
            double un = d > 0.0 ? u - fu / d : 0.5 * (lo + hi);
            if (!(un > lo) || !(un < hi)) un = 0.5 * (lo + hi);
            const bool done = std::abs(un - u) <= 1e-16 * u;
            u = un;
            if (done) break;
        }
    }
    return -2.0 / g1 * std::log(u);
}

struct PhiResult {
    double value = 0.0;
    bool clamped = false;       // P_p exceeded 1 (approximation overshoot); phi set to 0
    bool in_validity = true;    // validity flag of the closed-form evaluation
};

// phi_p(t) = P0^{-1}(P_p(t)) with P_p from the closed form.
inline PhiResult phi_p(const RestModel& model, const LabContext& ctx, double t,
                       const LabOptions& opt = {}) {
    const LabProbability pp = survival_probability_lab(model, ctx, t, opt);
    PhiResult out;
    out.in_validity = pp.in_validity;
    if (pp.value <= 0.0) throw DomainError("phi_p: closed-form P_p is nonpositive");
    if (pp.value > 1.0) {
        out.clamped = true;
        out.value = 0.0;
        return out;
    }
    out.value = p0_inverse(model.modes(), pp.value);
    return out;
}

struct LinearityReport {
    double max_deviation = 0.0;   // max |phi_p(t) gamma / t - 1|
    double mean_deviation = 0.0;
    double slope = 0.0;           // least-squares slope of phi_p versus t
    double slope_deviation = 0.0; // |slope * gamma - 1|
    std::vector<double> grid;
    std::vector<double> phi;
    std::vector<double> deviations;
};

// Deviation of phi_p from t/gamma over a geometric grid across the window.
inline LinearityReport linearity_diagnostic(const RestModel& model, const LabContext& ctx,
                                            const IntervalSet& window, std::size_t grid_size) {
    if (window.empty())
        throw DomainError("linearity_diagnostic: window is empty");
    if (grid_size < 2) throw DomainError("linearity_diagnostic: grid_size must be >= 2");

    LinearityReport rep;
    const double span = std::log(window.sup() / window.inf());
    for (const auto& iv : window.intervals()) {
        const double frac = std::log(iv.hi / iv.lo) / span;
        const std::size_t n = std::max<std::size_t>(2, static_cast<std::size_t>(frac * grid_size + 0.5));
        for (std::size_t i = 0; i < n; ++i)
            rep.grid.push_back(iv.lo * std::exp(std::log(iv.hi / iv.lo) * i / double(n - 1)));
    }

    double sum_dev = 0.0, sxx = 0.0, sxy = 0.0, sx = 0.0, sy = 0.0;
    for (double t : rep.grid) {
        const double phi = phi_p(model, ctx, t).value;
        const double dev = std::abs(phi * ctx.gamma / t - 1.0);
        rep.phi.push_back(phi);
        rep.deviations.push_back(dev);
        rep.max_deviation = std::max(rep.max_deviation, dev);
        sum_dev += dev;
        sx += t;
        sy += phi;
        sxx += t * t;
        sxy += t * phi;
    }
    const double n = static_cast<double>(rep.grid.size());
    rep.mean_deviation = sum_dev / n;
    rep.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    rep.slope_deviation = std::abs(rep.slope * ctx.gamma - 1.0);
    return rep;
}

}  // namespace decaylab
