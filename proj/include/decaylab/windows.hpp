#pragma once

// Exponential-time window estimation. A mode dominates the inverse-power-law
// part of the lab amplitude while K(zeta) = sqrt(zeta) exp(-zeta), evaluated at
// zeta = Gamma_j t / (2 gamma), stays above a threshold; the two roots of
// K(zeta) = threshold bound each mode's time interval, and the window is the
// normalized union over the dominant modes.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "decaylab/exp_modes.hpp"
#include "decaylab/lab_frame.hpp"
#include "decaylab/roots.hpp"

namespace decaylab {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double t) const { return t >= lo && t <= hi; }
    double length() const { return hi - lo; }
};

// Sorted union of closed intervals in normal form (overlapping or touching
// intervals merged).
class IntervalSet {
public:
    IntervalSet() = default;
    explicit IntervalSet(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
        normalize();
    }

    const std::vector<Interval>& intervals() const { return intervals_; }
    bool empty() const { return intervals_.empty(); }
    std::size_t size() const { return intervals_.size(); }

    bool contains(double t) const {
        for (const auto& iv : intervals_)
            if (iv.contains(t)) return true;
        return false;
    }

    double total_length() const {
        double s = 0.0;
        for (const auto& iv : intervals_) s += iv.length();
        return s;
    }

    double inf() const {
        if (intervals_.empty()) throw DomainError("IntervalSet: inf of empty set");
        return intervals_.front().lo;
    }
    double sup() const {
        if (intervals_.empty()) throw DomainError("IntervalSet: sup of empty set");
        return intervals_.back().hi;
    }

    IntervalSet scaled(double factor) const {
        std::vector<Interval> out;
        out.reserve(intervals_.size());
        for (const auto& iv : intervals_) out.push_back({factor * iv.lo, factor * iv.hi});
        return IntervalSet(std::move(out));
    }

private:
    void normalize() {
        for (const auto& iv : intervals_)
            if (!(iv.lo <= iv.hi)) throw DomainError("IntervalSet: interval with lo > hi");
        std::sort(intervals_.begin(), intervals_.end(),
                  [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
        std::vector<Interval> merged;
        for (const auto& iv : intervals_) {
            if (!merged.empty() && iv.lo <= merged.back().hi)
                merged.back().hi = std::max(merged.back().hi, iv.hi);
            else
                merged.push_back(iv);
        }
        intervals_ = std::move(merged);
    }

    std::vector<Interval> intervals_;
};

// K(zeta) = sqrt(zeta) exp(-zeta); single maximum K(1/2) ~= 0.4289.
inline double k_function(double zeta) {
    if (!(zeta >= 0.0)) throw DomainError("k_function: zeta must be >= 0");
    return std::sqrt(zeta) * std::exp(-zeta);
}

struct ZetaBounds {
    double zeta_min = 0.0;
    double zeta_max = 0.0;
    double threshold = 1e-2;
};

// Roots of K(zeta) = threshold on [0, 1/2] and [1/2, inf), to 1e-10 absolute.
inline ZetaBounds solve_zeta_bounds(double threshold = 1e-2) {
    const double kmax = k_function(0.5);
    if (!(threshold > 0.0) || threshold >= kmax)
        throw NoSolutionError("solve_zeta_bounds: threshold must lie in (0, K(1/2))");
    const auto f = [threshold](double z) { return k_function(z) - threshold; };
    const auto df = [](double z) { return (0.5 / std::sqrt(z) - std::sqrt(z)) * std::exp(-z); };

    RootOptions opt;
    opt.abs_tol = 1e-10;
    ZetaBounds out;
    out.threshold = threshold;
    out.zeta_min = solve_bracketed(f, df, 0.0, 0.5, opt);
    double hi = 1.0;
    while (f(hi) > 0.0) hi *= 2.0;
    out.zeta_max = solve_bracketed(f, df, 0.5, hi, opt);
    return out;
}

// Dominance parameters xi_j = (sum_i w_i Gamma_i / w_j) / (2M) *
// sqrt(Gamma_j sqrt(1 - 1/gamma^2) / (pi M)). The nonrelativistic limit
// gamma -> 1+ is excluded.
inline std::vector<double> xi_parameters(const RestModel& model, const LabContext& ctx) {
    if (!(ctx.gamma > 1.0))
        throw ExcludedRegimeError("xi_parameters: gamma must exceed 1 (p > 0 required)");
    const double mass = model.mass();
    const double wsum = model.modes().weighted_width_sum();
    const double beta = std::sqrt(1.0 - 1.0 / (ctx.gamma * ctx.gamma));
    std::vector<double> xi;
    xi.reserve(model.modes().size());
    for (const auto& m : model.modes().modes())
        xi.push_back(wsum / m.w / (2.0 * mass) * std::sqrt(m.gamma * beta / (kPi * mass)));
    return xi;
}

// Indices (1-based, strictly increasing) of modes with
// xi_j <= dominance_factor * 1e-2. An empty result is valid.
inline std::vector<std::size_t> dominant_indices(const std::vector<double>& xi,
                                                 double dominance_factor = 1e-2) {
    if (!(dominance_factor > 0.0 && dominance_factor < 1.0))
        throw DomainError("dominant_indices: dominance_factor must lie in (0, 1)");
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < xi.size(); ++j)
        if (xi[j] <= dominance_factor * 1e-2) idx.push_back(j + 1);
    return idx;
}

struct ConstraintMargins {
    double pt_margin = 0.0;         // p * t at the window infimum, vs >> 1
    double t_gamma1_margin = 0.0;   // 10 Gamma_1 t at the window infimum, vs > 1
    double mt_margin = 0.0;         // M * t at the window infimum, vs >> 1
    bool pt_ok = false;
    bool t_gamma1_ok = false;
    bool mt_ok = false;
};

struct WindowReport {
    std::vector<std::size_t> dominant_indices;  // 1-based, strictly increasing
    std::vector<double> xi;                     // all N dominance parameters
    std::vector<Interval> mode_intervals_lab;   // I_{p,l}, aligned with dominant_indices
    IntervalSet window_lab;                     // I_p
    IntervalSet window_rest;                    // I_0
    bool closed_interval = false;
    ConstraintMargins margins;
    ZetaBounds bounds;
    double gamma = 1.0;
    double dominance_factor = 1e-2;
    // diagnostics when the dominant set is empty
    double min_failing_xi = 0.0;
    double admitting_dominance_factor = 0.0;
};

// Window of exponential times in both frames. The rest-frame intervals are
// built first and the lab intervals as gamma * endpoints, so I_p = gamma * I_0
// holds exactly.
inline WindowReport exponential_window(const RestModel& model, const LabContext& ctx,
                                       const ZetaBounds& bounds, double dominance_factor = 1e-2) {
    WindowReport rep;
    rep.bounds = bounds;
    rep.gamma = ctx.gamma;
    rep.dominance_factor = dominance_factor;
    rep.xi = xi_parameters(model, ctx);
    rep.dominant_indices = dominant_indices(rep.xi, dominance_factor);

    if (rep.dominant_indices.empty()) {
        rep.min_failing_xi = *std::min_element(rep.xi.begin(), rep.xi.end());
        rep.admitting_dominance_factor = rep.min_failing_xi / 1e-2;
        return rep;
    }

    std::vector<Interval> rest, lab;
    for (std::size_t j1 : rep.dominant_indices) {
        const double g = model.modes()[j1 - 1].gamma;
        const Interval r{2.0 * bounds.zeta_min / g, 2.0 * bounds.zeta_max / g};
        rest.push_back(r);
        lab.push_back({ctx.gamma * r.lo, ctx.gamma * r.hi});
    }
    rep.mode_intervals_lab = lab;
    rep.window_rest = IntervalSet(std::move(rest));
    rep.window_lab = IntervalSet(std::move(lab));
    rep.closed_interval = rep.window_lab.size() == 1;

    const double t_lo = rep.window_lab.inf();
    rep.margins.pt_margin = ctx.p * t_lo;
    rep.margins.t_gamma1_margin = 10.0 * model.modes().gamma_min() * t_lo;
    rep.margins.mt_margin = model.mass() * t_lo;
    rep.margins.pt_ok = rep.margins.pt_margin >= 10.0;
    rep.margins.t_gamma1_ok = rep.margins.t_gamma1_margin > 1.0;
    rep.margins.mt_ok = rep.margins.mt_margin >= 10.0;
    return rep;
}

// Exponential-like decay over the window: square of the sum of dominant modes
// that have not yet decayed past their interval. Modes whose interval lies
// entirely before t are dropped (their amplitude is below exp(-zeta_max));
// modes whose interval has not opened yet are kept, since an undecayed mode
// cannot be neglected against the selected ones.
inline double dominant_mode_decay(const RestModel& model, const LabContext& ctx,
                                  const WindowReport& report, double t) {
    if (report.window_lab.empty() || !report.window_lab.contains(t))
        throw OutOfWindowError("dominant_mode_decay: t outside the exponential window");
    double s = 0.0;
    for (std::size_t l = 0; l < report.dominant_indices.size(); ++l) {
        if (t > report.mode_intervals_lab[l].hi) continue;
        const auto& m = model.modes()[report.dominant_indices[l] - 1];
        s += m.w * std::exp(-0.5 * m.gamma * t / ctx.gamma);
    }
    return s * s;
}

}  // namespace decaylab
