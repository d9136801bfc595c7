#pragma once

// Finite exponential-mode representation of a canonical decay law at rest:
// the modulus of the survival amplitude is sum_j w_j exp(-Gamma_j t / 2) with
// normalized weights and strictly increasing decay widths.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "decaylab/errors.hpp"

namespace decaylab {

struct ExpMode {
    double w = 0.0;      // normalized weight, > 0
    double gamma = 0.0;  // decay width, inverse-time units
};

class ExpModeSet {
public:
    explicit ExpModeSet(std::vector<ExpMode> modes) : modes_(std::move(modes)) {
        validate();
    }

    const std::vector<ExpMode>& modes() const { return modes_; }
    std::size_t size() const { return modes_.size(); }
    const ExpMode& operator[](std::size_t j) const { return modes_[j]; }

    double gamma_min() const { return modes_.front().gamma; }
    double gamma_max() const { return modes_.back().gamma; }

    // sum_j w_j Gamma_j, the weighted mean width.
    double weighted_width_sum() const {
        double s = 0.0;
        for (const auto& m : modes_) s += m.w * m.gamma;
        return s;
    }

private:
    void validate() const {
        if (modes_.empty()) throw DomainError("ExpModeSet: need at least one mode");
        double sum = 0.0;
        double prev = 0.0;
        for (const auto& m : modes_) {
            if (!(m.w > 0.0) || !std::isfinite(m.w))
                throw DomainError("ExpModeSet: weights must be positive and finite");
            if (!(m.gamma > prev) || !std::isfinite(m.gamma))
                throw DomainError("ExpModeSet: widths must be finite, positive and strictly increasing");
            prev = m.gamma;
            sum += m.w;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw DomainError("ExpModeSet: weights must sum to 1 (got " + std::to_string(sum) + ")");
    }

    std::vector<ExpMode> modes_;
};

// Mode set plus resonance mass; Gamma_N / M must stay small for the lab-frame
// closed form to apply. The ratio bound is configurable; violations raise, the
// check itself can also be queried without constructing.
class RestModel {
public:
    static constexpr double kDefaultRatioMax = 1e-2;

    RestModel(ExpModeSet modeset, double mass, double ratio_max = kDefaultRatioMax)
        : modeset_(std::move(modeset)), mass_(mass), ratio_max_(ratio_max) {
        if (!(mass > 0.0) || !std::isfinite(mass)) throw DomainError("RestModel: mass must be positive");
        if (!(ratio_max > 0.0)) throw DomainError("RestModel: ratio_max must be positive");
        if (width_mass_ratio() > ratio_max)
            throw DomainError("RestModel: Gamma_N/M = " + std::to_string(width_mass_ratio()) +
                              " exceeds ratio_max = " + std::to_string(ratio_max));
    }

    const ExpModeSet& modes() const { return modeset_; }
    double mass() const { return mass_; }
    double ratio_max() const { return ratio_max_; }
    double width_mass_ratio() const { return modeset_.gamma_max() / mass_; }

    static bool smallness_holds(const ExpModeSet& ms, double mass, double ratio_max = kDefaultRatioMax) {
        return ms.gamma_max() / mass <= ratio_max;
    }

private:
    ExpModeSet modeset_;
    double mass_;
    double ratio_max_;
};

// Sampled (time, value) decay trace; strictly increasing times, values in (0, 1]
// and non-increasing (canonical monotone decay).
class SurvivalCurve {
public:
    struct Sample {
        double t;
        double v;
    };

    explicit SurvivalCurve(std::vector<Sample> samples) : samples_(std::move(samples)) {
        if (samples_.size() < 2) throw DomainError("SurvivalCurve: need at least two samples");
        double pt = -1.0, pv = 2.0;
        for (const auto& s : samples_) {
            if (!(s.t >= 0.0) || !std::isfinite(s.t) || !(s.t > pt))
                throw DomainError("SurvivalCurve: times must be nonnegative and strictly increasing");
            if (!(s.v > 0.0) || !(s.v <= 1.0))
                throw DomainError("SurvivalCurve: values must lie in (0, 1]");
            if (s.v > pv)
                throw DomainError("SurvivalCurve: values must be non-increasing");
            pt = s.t;
            pv = s.v;
        }
    }

    const std::vector<Sample>& samples() const { return samples_; }
    std::size_t size() const { return samples_.size(); }

private:
    std::vector<Sample> samples_;
};

struct FitConfig {
    std::size_t modes = 1;        // target mode count N
    std::size_t restarts = 16;    // Monte Carlo restart count
    std::uint64_t seed = 1;       // master RNG seed
    std::size_t max_iters = 6000; // function-evaluation budget per restart
    double tolerance = 1e-14;     // simplex f-spread convergence target
};

// Modulus of the survival amplitude at rest, sum_j w_j exp(-Gamma_j t / 2).
inline double evaluate_modulus(const ExpModeSet& model, double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("evaluate_modulus: t must be >= 0");
    double s = 0.0;
    for (const auto& m : model.modes()) s += m.w * std::exp(-0.5 * m.gamma * t);
    return s;
}

// Survival probability at rest, P0(t) = (sum_j w_j exp(-Gamma_j t/2))^2.
inline double survival_probability_rest(const ExpModeSet& model, double t) {
    const double a = evaluate_modulus(model, t);
    return a * a;
}

// Stretched exponential decay exp(-(t/tau)^theta), 0 < theta < 1. The pure
// exponential limit theta = 1 is admitted only when explicitly requested.
inline double stretched_exponential(double t, double tau, double theta,
                                    bool allow_exponential_limit = false) {
    if (!(t >= 0.0)) throw DomainError("stretched_exponential: t must be >= 0");
    if (!(tau > 0.0)) throw DomainError("stretched_exponential: tau must be > 0");
    const bool in_range = theta > 0.0 && (theta < 1.0 || (allow_exponential_limit && theta == 1.0));
    if (!in_range) throw DomainError("stretched_exponential: theta must lie in (0, 1)");
    return std::exp(-std::pow(t / tau, theta));
}

}  // namespace decaylab
