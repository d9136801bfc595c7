#pragma once

// Brute-force evaluation of the survival amplitudes by direct quadrature of
// the mass-distribution-density integrals. Panels are walked from the lower
// spectral bound with widths capped by the local density structure and by a
// phase change of at most pi per panel (measured with actual phase
// evaluations, so curvature needs no separate bound); each panel uses
// fixed-order Gauss-Legendre nodes and a compensated complex sum, which makes
// results deterministic. Truncation adapts to the integration-by-parts tail
// bound and is capped at m_max = M + max(1e4 Gamma_N, 50 M); whatever tail is
// cut contributes to the reported error bound, never silently.
//
// For the Lorentzian-sum MDD both amplitudes use the half-line pair form
// (pole plus mirror denominator on [0, inf)); the lab amplitude at p = 0 then
// coincides with the rest amplitude by construction, and the neglected
// negative-mass phase difference is quantified by negative_mass_contribution.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <variant>
#include <vector>

#include "decaylab/exp_modes.hpp"
#include "decaylab/lab_frame.hpp"

namespace decaylab::oracle {

struct LorentzianSumMdd {
    ExpModeSet modes;
    double mass;
};

struct BreitWignerMdd {
    double mass;
    double width;
};

// Threshold power law (m - mu0)^alpha omega0(mu0) exp(-(m - mu0)/scale).
struct ThresholdPowerLawMdd {
    TailSpec tail;
    double scale;
};

using MddSpec = std::variant<LorentzianSumMdd, BreitWignerMdd, ThresholdPowerLawMdd>;

// omega0 value that normalizes the threshold MDD to unit mass.
inline ThresholdPowerLawMdd normalized_threshold_mdd(double alpha, double mu0, double scale) {
    const double w0 = 1.0 / (std::tgamma(1.0 + alpha) * std::pow(scale, 1.0 + alpha));
    return {TailSpec(alpha, mu0, w0), scale};
}

struct QuadratureConfig {
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    std::size_t max_panels = 8000000;
    double truncation_mass = 0.0;  // upper cutoff m_max; 0 selects it automatically
    int panel_rule = 8;            // Gauss-Legendre nodes per panel (8 or 16)
    int l0 = 1;                    // overall sign of the pair form, +1 or -1
};

struct AmplitudeResult {
    std::complex<double> value;
    double error_bound = 0.0;
    std::size_t panels = 0;
};

namespace quaddetail {

inline constexpr std::array<double, 4> kGl8X = {0.1834346424956498, 0.5255324099163290,
                                                0.7966664774136267, 0.9602898564975363};
inline constexpr std::array<double, 4> kGl8W = {0.3626837833783620, 0.3137066458778873,
                                                0.2223810344533745, 0.1012285362903763};
inline constexpr std::array<double, 8> kGl16X = {0.0950125098376374, 0.2816035507792589,
                                                 0.4580167776572274, 0.6178762444026438,
                                                 0.7554044083550030, 0.8656312023878318,
                                                 0.9445750230732326, 0.9894009349916499};
inline constexpr std::array<double, 8> kGl16W = {0.1894506104550685, 0.1826034150449236,
                                                 0.1691565193950025, 0.1495959888165767,
                                                 0.1246289712555339, 0.0951585116824928,
                                                 0.0622535239386479, 0.0271524594117541};

struct KahanComplex {
    double re = 0.0, im = 0.0, cre = 0.0, cim = 0.0;

    void add(std::complex<double> v) {
        const double yr = v.real() - cre;
        const double tr = re + yr;
        cre = (tr - re) - yr;
        re = tr;
        const double yi = v.imag() - cim;
        const double ti = im + yi;
        cim = (ti - im) - yi;
        im = ti;
    }
    std::complex<double> value() const { return {re, im}; }
};

// Lab-frame phase sqrt(p^2 + m^2); reduces to m at p = 0.
struct Phase {
    double p = 0.0;
    double t = 0.0;

    double value(double m) const { return std::hypot(p, m); }
    double d1(double m) const {
        const double h = std::hypot(p, m);
        return h > 0.0 ? m / h : 0.0;
    }
};

struct MddInfo {
    double lower = 0.0;        // lower edge of the integration domain
    double center = 0.0;       // pole location (resonance mass) or threshold
    double gamma_max = 0.0;    // widest structural scale driving truncation
    double weighted_width = 0.0;
};

inline MddInfo info_of(const MddSpec& mdd) {
    return std::visit(
        [](const auto& v) -> MddInfo {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, LorentzianSumMdd>)
                return {0.0, v.mass, v.modes.gamma_max(), v.modes.weighted_width_sum()};
            else if constexpr (std::is_same_v<T, BreitWignerMdd>)
                return {0.0, v.mass, v.width, v.width};
            else
                return {v.tail.mu0, v.tail.mu0, v.scale, 0.0};
        },
        mdd);
}

inline double density(const MddSpec& mdd, double m) {
    return std::visit(
        [m](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, LorentzianSumMdd>) {
                double s = 0.0;
                for (const auto& md : v.modes.modes()) {
                    const double q = 0.25 * md.gamma * md.gamma;
                    const double dm = m - v.mass;
                    const double dp = m + v.mass;
                    s += md.w * md.gamma / (2.0 * kPi) * (1.0 / (dm * dm + q) + 1.0 / (dp * dp + q));
                }
                return s;
            } else if constexpr (std::is_same_v<T, BreitWignerMdd>) {
                if (m < 0.0) return 0.0;
                const double dm = m - v.mass;
                return v.width / (2.0 * kPi) / (dm * dm + 0.25 * v.width * v.width);
            } else {
                if (m < v.tail.mu0) return 0.0;
                const double x = m - v.tail.mu0;
                return std::pow(x, v.tail.alpha) * v.tail.omega0_at_mu0 * std::exp(-x / v.scale);
            }
        },
        mdd);
}

// Local density resolution scale: panels never exceed it.
inline double structure_scale(const MddSpec& mdd, double m) {
    return std::visit(
        [m](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, LorentzianSumMdd>) {
                double s = 1e300;
                for (const auto& md : v.modes.modes()) {
                    s = std::min(s, std::max(md.gamma / 4.0, std::abs(m - v.mass) / 4.0));
                    s = std::min(s, std::max(md.gamma / 4.0, std::abs(m + v.mass) / 4.0));
                }
                return s;
            } else if constexpr (std::is_same_v<T, BreitWignerMdd>) {
                return std::max(v.width / 4.0, std::abs(m - v.mass) / 4.0);
            } else {
                return std::max(v.scale / 4.0, (m - v.tail.mu0) / 4.0);
            }
        },
        mdd);
}

// Analytic bound on the density mass above x.
inline double tail_mass_above(const MddSpec& mdd, double x) {
    return std::visit(
        [x](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, LorentzianSumMdd>) {
                double s = 0.0;
                for (const auto& md : v.modes.modes()) {
                    s += md.w / kPi * (0.5 * kPi - std::atan(2.0 * (x - v.mass) / md.gamma));
                    s += md.w / kPi * (0.5 * kPi - std::atan(2.0 * (x + v.mass) / md.gamma));
                }
                return s;
            } else if constexpr (std::is_same_v<T, BreitWignerMdd>) {
                return 1.0 / kPi * (0.5 * kPi - std::atan(2.0 * (x - v.mass) / v.width));
            } else {
                const double u = x - v.tail.mu0;
                if (u <= 0.0) return 1.0;
                return 2.0 * v.tail.omega0_at_mu0 * std::pow(u, v.tail.alpha) * v.scale *
                       std::exp(-u / v.scale);
            }
        },
        mdd);
}

// Truncation error bound at cutoff x for oscillation time t: the smaller of
// the plain tail mass and the integration-by-parts estimate 2 w(x)/(t phi').
inline double truncation_bound(const MddSpec& mdd, const Phase& ph, double x) {
    double b = tail_mass_above(mdd, x);
    if (ph.t > 0.0) {
        const double d1 = ph.d1(x);
        if (d1 > 0.0) b = std::min(b, 2.0 * density(mdd, x) / (ph.t * d1));
    }
    return b;
}

inline double select_m_max(const MddSpec& mdd, const Phase& ph, const QuadratureConfig& cfg) {
    if (cfg.truncation_mass > 0.0) return cfg.truncation_mass;
    const MddInfo info = info_of(mdd);
    const double cap = std::holds_alternative<ThresholdPowerLawMdd>(mdd)
                           ? info.center + 200.0 * info.gamma_max
                           : info.center + std::max(1e4 * info.gamma_max, 50.0 * info.center);
    double x = info.center + 10.0 * info.gamma_max;
    while (x < cap && truncation_bound(mdd, ph, x) > 0.25 * cfg.abs_tol) x *= 1.5;
    return std::min(x, cap);
}

template <typename F>
std::complex<double> panel_walk(const F& f, const MddSpec& mdd, const Phase& ph, double a,
                                double b, double width_scale, const QuadratureConfig& cfg,
                                std::size_t& panels) {
    const bool gl16 = cfg.panel_rule == 16;
    if (!gl16 && cfg.panel_rule != 8)
        throw DomainError("oracle: panel_rule must be 8 or 16");
    KahanComplex acc;
    const double range = b - a;
    const bool graded = std::holds_alternative<ThresholdPowerLawMdd>(mdd);
    double m = a;
    while (m < b) {
        double w = std::min(structure_scale(mdd, m + 1e-300), range / 16.0);
        if (graded) {
            const double off = m - a;
            w = std::min(w, std::max(0.5 * off, range * 1e-7));
        }
        w *= width_scale;
        w = std::min(w, b - m);
        if (ph.t > 0.0) {
            for (int it = 0; it < 60; ++it) {
                const double dphi = ph.t * (ph.value(m + w) - ph.value(m));
                if (dphi <= kPi * width_scale || w <= (b - a) * 1e-15) break;
                w *= std::max(0.05, 0.95 * kPi * width_scale / dphi);
                w = std::min(w, b - m);
            }
        }
        const double c = m + 0.5 * w;
        const double h = 0.5 * w;
        if (gl16) {
            for (std::size_t i = 0; i < kGl16X.size(); ++i) {
                acc.add(h * kGl16W[i] * f(c - h * kGl16X[i]));
                acc.add(h * kGl16W[i] * f(c + h * kGl16X[i]));
            }
        } else {
            for (std::size_t i = 0; i < kGl8X.size(); ++i) {
                acc.add(h * kGl8W[i] * f(c - h * kGl8X[i]));
                acc.add(h * kGl8W[i] * f(c + h * kGl8X[i]));
            }
        }
        m += w;
        if (++panels > cfg.max_panels)
            throw PrecisionError("oracle: panel budget exhausted", acc.value(), 1e300);
    }
    return acc.value();
}

inline AmplitudeResult amplitude(const MddSpec& mdd, double p, double t,
                                 const QuadratureConfig& cfg) {
    if (!(t >= 0.0)) throw DomainError("oracle: t must be >= 0");
    if (!(p >= 0.0)) throw DomainError("oracle: p must be >= 0");
    const Phase ph{p, t};
    const MddInfo info = info_of(mdd);
    const double m_max = select_m_max(mdd, ph, cfg);
    const double tail = truncation_bound(mdd, ph, m_max);

    const auto f = [&](double m) -> std::complex<double> {
        return density(mdd, m) * std::polar(1.0, -ph.value(m) * t);
    };

    AmplitudeResult out;
    std::complex<double> coarse = panel_walk(f, mdd, ph, info.lower, m_max, 1.0, cfg, out.panels);
    std::complex<double> fine = panel_walk(f, mdd, ph, info.lower, m_max, 0.5, cfg, out.panels);
    double osc_err = std::abs(fine - coarse);
    for (double scale = 0.25; scale >= 0.125; scale *= 0.5) {
        if (osc_err <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(fine))) break;
        coarse = fine;
        fine = panel_walk(f, mdd, ph, info.lower, m_max, scale, cfg, out.panels);
        osc_err = std::abs(fine - coarse);
    }
    out.value = static_cast<double>(cfg.l0) * fine;
    out.error_bound = osc_err + tail;
    if (osc_err > std::max(cfg.abs_tol, cfg.rel_tol * std::abs(fine)))
        throw PrecisionError("oracle: quadrature did not converge", out.value, out.error_bound);
    return out;
}

}  // namespace quaddetail

// Rest-frame survival amplitude A_0(t) by direct quadrature.
inline AmplitudeResult amplitude_rest_oracle(const MddSpec& mdd, double t,
                                             const QuadratureConfig& cfg = {}) {
    return quaddetail::amplitude(mdd, 0.0, t, cfg);
}

// Lab-frame survival amplitude A_p(t) by direct quadrature of the pair form.
inline AmplitudeResult amplitude_lab_oracle(const MddSpec& mdd, double p, double t,
                                            const QuadratureConfig& cfg = {}) {
    return quaddetail::amplitude(mdd, p, t, cfg);
}

// Total MDD mass: quadrature over [lower, m_max] plus the analytic tail.
inline double mdd_normalization(const MddSpec& mdd, const QuadratureConfig& cfg = {}) {
    const quaddetail::Phase ph{0.0, 0.0};
    const auto info = quaddetail::info_of(mdd);
    const double m_max = quaddetail::select_m_max(mdd, ph, cfg);
    const auto f = [&](double m) -> std::complex<double> { return {quaddetail::density(mdd, m), 0.0}; };
    std::size_t panels = 0;
    const auto v = quaddetail::panel_walk(f, mdd, ph, info.lower, m_max, 1.0, cfg, panels);
    return v.real() + quaddetail::tail_mass_above(mdd, m_max);
}

// Contribution of the unphysical m < 0 part of a full-line Lorentzian sum to
// the rest amplitude (integral over the negative axis with phase exp(-i m t)).
inline std::complex<double> negative_mass_contribution(const LorentzianSumMdd& mdd, double t,
                                                       const QuadratureConfig& cfg = {}) {
    // substitute m -> -m: integral over [0, inf) of mirror density with e^{+imt}
    MddSpec spec = mdd;
    const quaddetail::Phase ph{0.0, t};
    const double m_max = quaddetail::select_m_max(spec, ph, cfg);
    const auto f = [&](double m) -> std::complex<double> {
        double s = 0.0;
        for (const auto& md : mdd.modes.modes()) {
            const double dp = m + mdd.mass;
            s += md.w * md.gamma / (2.0 * kPi) / (dp * dp + 0.25 * md.gamma * md.gamma);
        }
        return s * std::polar(1.0, m * t);
    };
    std::size_t panels = 0;
    return quaddetail::panel_walk(f, spec, ph, 0.0, m_max, 1.0, cfg, panels);
}

// Inverse cosine transform of a sampled modulus: omega(M + m') =
// (1/pi) |int_0^inf sqrt(P0(t')) cos(m' t') dt'|. Each sample gap is bridged
// by a local exponential, whose product with the cosine integrates in closed
// form; the tail beyond the last sample extrapolates the final local rate.
inline double mdd_from_modulus(const SurvivalCurve& curve, double /*mass*/, double m_offset,
                               const QuadratureConfig& = {}) {
    const auto& s = curve.samples();
    const std::complex<double> iw(0.0, m_offset);

    const auto segment = [&](double t0, double v0, double lambda, double dt) {
        // integral of v0 exp(-lambda (t - t0)) cos(m' t) over [t0, t0 + dt]
        const std::complex<double> a = iw - lambda;
        const std::complex<double> phase = std::polar(1.0, m_offset * t0);
        if (std::abs(a) * dt < 1e-12) return (v0 * phase * dt).real();
        return (v0 * phase * (std::exp(a * dt) - 1.0) / a).real();
    };

    double total = 0.0;
    // head: extend the first segment's rate back to t = 0
    const double lam0 =
        std::log(s[0].v / s[1].v) / (s[1].t - s[0].t);
    if (s[0].t > 0.0) total += segment(0.0, s[0].v * std::exp(lam0 * s[0].t), lam0, s[0].t);
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        const double dt = s[i + 1].t - s[i].t;
        const double lam = std::log(s[i].v / s[i + 1].v) / dt;
        total += segment(s[i].t, s[i].v, lam, dt);
    }
    const double lam_tail = std::log(s[s.size() - 2].v / s.back().v) /
                            (s.back().t - s[s.size() - 2].t);
    if (!(lam_tail > 0.0))
        throw PrecisionError("mdd_from_modulus: non-decaying tail, transform does not converge",
                             {total, 0.0}, 1e300);
    // closed-form tail: v_n exp(-lam (t - t_n)) cos(m' t) integrated to infinity
    const std::complex<double> a = iw - lam_tail;
    total += (s.back().v * std::polar(1.0, m_offset * s.back().t) * (0.0 - 1.0) / a).real();
    return std::abs(total) / kPi;
}

// Closed-form route for a known mode set: sum of Lorentzians at offset m'.
inline double mdd_from_modulus(const ExpModeSet& modes, double m_offset) {
    double s = 0.0;
    for (const auto& m : modes.modes())
        s += m.w * m.gamma / (2.0 * kPi) / (m_offset * m_offset + 0.25 * m.gamma * m.gamma);
    return s;
}

// Survival probability from the double-integral link between frames: the inner
// cosine transform is taken in closed form per mode (the mdd_from_modulus
// route) and the outer oscillatory integral reuses the panel engine.
inline double double_integral_link_check(const RestModel& model, double p, double t,
                                         const QuadratureConfig& cfg = {}) {
    MddSpec spec = LorentzianSumMdd{model.modes(), model.mass()};
    const quaddetail::Phase ph{p, t};
    const double m_max = quaddetail::select_m_max(spec, ph, cfg);
    const auto f = [&](double m) -> std::complex<double> {
        const double dens = mdd_from_modulus(model.modes(), m - model.mass()) +
                            mdd_from_modulus(model.modes(), m + model.mass());
        return dens * std::polar(1.0, -ph.value(m) * t);
    };
    std::size_t panels = 0;
    const auto coarse = quaddetail::panel_walk(f, spec, ph, 0.0, m_max, 1.0, cfg, panels);
    const auto fine = quaddetail::panel_walk(f, spec, ph, 0.0, m_max, 0.5, cfg, panels);
    if (std::abs(fine - coarse) > std::max(cfg.abs_tol, cfg.rel_tol * std::abs(fine)))
        throw PrecisionError("double_integral_link_check: quadrature did not converge", fine,
                             std::abs(fine - coarse));
    return std::norm(fine);
}

}  // namespace decaylab::oracle
