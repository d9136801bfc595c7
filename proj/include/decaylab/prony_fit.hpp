#pragma once

// Prony-style fit of a sampled decay modulus by a finite exponential-mode sum.
//
// Parameterization keeps every candidate feasible: widths as log Gamma_j and
// weights through a softmax with the first logit pinned to zero (removes the
// shift gauge). Width ladders are drawn log-uniformly over the rate range the
// samples can resolve; restart 0 is a deterministic geometric ladder. Each
// restart runs a derivative-free Nelder-Mead descent of the RMSE, and the best
// restart gets a few re-seeded polish rounds.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

#include "decaylab/exp_modes.hpp"

namespace decaylab {

struct FitReport {
    double rmse = 0.0;
    bool converged = false;
    std::size_t best_restart = 0;
    std::vector<double> restart_rmse;  // best value reached by each restart
    std::size_t evaluations = 0;
};

struct FitResult {
    ExpModeSet modes;
    FitReport report;
};

// Fit failure still carries the best model found.
class FitError : public std::runtime_error {
public:
    FitError(const std::string& what, FitResult best)
        : std::runtime_error(what), best_(std::move(best)) {}
    const FitResult& best() const { return best_; }

private:
    FitResult best_;
};

namespace fitdetail {

struct Objective {
    const std::vector<SurvivalCurve::Sample>* samples;
    std::size_t n_modes;
    // identifiable log-width range: a mode must decay measurably somewhere on
    // the sampled span; widths outside are penalized quadratically
    double log_gamma_lo = -700.0;
    double log_gamma_hi = 700.0;

    // x = [logit_2 .. logit_N, log g_1 .. log g_N], logit_1 = 0
    double operator()(const std::vector<double>& x) const {
        const std::size_t n = n_modes;
        for (double xi : x)
            if (!(std::abs(xi) < 80.0)) return 1e100;
        double penalty = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double b = x[n - 1 + j];
            if (b > log_gamma_hi) penalty += (b - log_gamma_hi) * (b - log_gamma_hi);
            if (b < log_gamma_lo) penalty += (log_gamma_lo - b) * (log_gamma_lo - b);
        }
        double zmax = 0.0;
        for (std::size_t j = 0; j + 1 < n; ++j) zmax = std::max(zmax, x[j]);
        double zsum = std::exp(0.0 - zmax);
        for (std::size_t j = 0; j + 1 < n; ++j) zsum += std::exp(x[j] - zmax);

        double ss = 0.0;
        for (const auto& s : *samples) {
            double m = std::exp(0.0 - zmax) * std::exp(-0.5 * std::exp(x[n - 1]) * s.t);
            for (std::size_t j = 0; j + 1 < n; ++j)
                m += std::exp(x[j] - zmax) * std::exp(-0.5 * std::exp(x[n + j]) * s.t);
            m /= zsum;
            const double r = m - s.v;
            ss += r * r;
        }
        return std::sqrt(ss / static_cast<double>(samples->size())) + penalty;
    }

    void decode(const std::vector<double>& x, std::vector<ExpMode>& out) const {
        const std::size_t n = n_modes;
        double zmax = 0.0;
        for (std::size_t j = 0; j + 1 < n; ++j) zmax = std::max(zmax, x[j]);
        double zsum = std::exp(0.0 - zmax);
        for (std::size_t j = 0; j + 1 < n; ++j) zsum += std::exp(x[j] - zmax);
        out.clear();
        out.push_back({std::exp(0.0 - zmax) / zsum, std::exp(x[n - 1])});
        for (std::size_t j = 0; j + 1 < n; ++j)
            out.push_back({std::exp(x[j] - zmax) / zsum, std::exp(x[n + j])});
    }
};

struct NmResult {
    std::vector<double> x;
    double f = 0.0;
    bool converged = false;
    std::size_t evals = 0;
};

// Nelder-Mead with the dimension-adaptive coefficients of Gao & Han.
inline NmResult nelder_mead(const Objective& fn, std::vector<double> x0, double step,
                            std::size_t max_evals, double ftol) {
    const std::size_t n = x0.size();
    const double alpha = 1.0;
    const double beta = 1.0 + 2.0 / static_cast<double>(n);
    const double gamma = 0.75 - 0.5 / static_cast<double>(n);
    const double delta = 1.0 - 1.0 / static_cast<double>(n);

    std::vector<std::vector<double>> simplex(n + 1, x0);
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += step;

    NmResult res;
    for (std::size_t i = 0; i <= n; ++i) fv[i] = fn(simplex[i]);
    res.evals = n + 1;

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);

    while (res.evals < max_evals) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = order[0], worst = order[n], second = order[n - 1];

        if (fv[worst] - fv[best] <= ftol * (std::abs(fv[best]) + 1.0) || fv[worst] - fv[best] <= 1e-300) {
            res.converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i)
            if (i != worst)
                for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k];
        for (std::size_t k = 0; k < n; ++k) centroid[k] /= static_cast<double>(n);

        for (std::size_t k = 0; k < n; ++k) xr[k] = centroid[k] + alpha * (centroid[k] - simplex[worst][k]);
        const double fr = fn(xr);
        ++res.evals;

        if (fr < fv[best]) {
            for (std::size_t k = 0; k < n; ++k) xe[k] = centroid[k] + beta * (xr[k] - centroid[k]);
            const double fe = fn(xe);
            ++res.evals;
            if (fe < fr) {
                simplex[worst] = xe;
                fv[worst] = fe;
            } else {
                simplex[worst] = xr;
                fv[worst] = fr;
            }
        } else if (fr < fv[second]) {
            simplex[worst] = xr;
            fv[worst] = fr;
        } else {
            const bool outside = fr < fv[worst];
            if (outside)
                for (std::size_t k = 0; k < n; ++k) xc[k] = centroid[k] + gamma * (xr[k] - centroid[k]);
            else
                for (std::size_t k = 0; k < n; ++k) xc[k] = centroid[k] - gamma * (xr[k] - centroid[k]);
            const double fc = fn(xc);
            ++res.evals;
            if (fc < std::min(fr, fv[worst])) {
                simplex[worst] = xc;
                fv[worst] = fc;
            } else {
                // shrink toward the best vertex
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (std::size_t k = 0; k < n; ++k)
                        simplex[i][k] = simplex[best][k] + delta * (simplex[i][k] - simplex[best][k]);
                    fv[i] = fn(simplex[i]);
                    ++res.evals;
                }
            }
        }
    }

    std::size_t ib = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (fv[i] < fv[ib]) ib = i;
    res.x = simplex[ib];
    res.f = fv[ib];
    return res;
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace fitdetail

// Fit an N-mode exponential sum to curve values interpreted as the amplitude
// modulus sqrt(P0). Near-duplicate widths (relative gap < 1e-9) are merged with
// summed weights before the invariant-checked mode set is built.
inline FitResult fit_prony(const SurvivalCurve& curve, const FitConfig& cfg) {
    const std::size_t n = cfg.modes;
    if (n < 1) throw DomainError("fit_prony: need modes >= 1");
    if (cfg.restarts < 1) throw DomainError("fit_prony: need restarts >= 1");
    if (curve.size() < 2 * n)
        throw InsufficientSamplesError("fit_prony: need at least 2N samples");

    const auto& s = curve.samples();
    fitdetail::Objective obj{&s, n};
    const std::size_t dim = 2 * n - 1;

    // Observable rate range: from the slowest decade the grid spans up to a few
    // times the initial logarithmic decay rate.
    const double t_last = s.back().t;
    const double t_head = s.front().t > 0.0 ? s.front().t : s[1].t;
    double rate0 = 2.0 * (std::log(s[0].v) - std::log(s[1].v)) / (s[1].t - s[0].t);
    if (!(rate0 > 0.0) || !std::isfinite(rate0)) rate0 = 1.0 / t_last;
    const double lg_lo = std::log(0.5 / t_last);
    const double lg_hi = std::log(4.0 * rate0) > lg_lo ? std::log(4.0 * rate0) : lg_lo + 1.0;
    obj.log_gamma_lo = std::log(0.5 / t_last);
    obj.log_gamma_hi = std::log(40.0 / t_head);

    FitReport report;
    report.restart_rmse.assign(cfg.restarts, 0.0);
    fitdetail::NmResult best;
    best.f = 1e300;

    for (std::size_t r = 0; r < cfg.restarts; ++r) {
        std::vector<double> x0(dim, 0.0);
        if (r == 0) {
            for (std::size_t j = 0; j < n; ++j)
                x0[n - 1 + j] =
                    n == 1 ? 0.5 * (lg_lo + lg_hi)
                           : lg_lo + (lg_hi - lg_lo) * static_cast<double>(j) / static_cast<double>(n - 1);
        } else {
            std::mt19937_64 rng(fitdetail::mix_seed(cfg.seed, r));
            std::uniform_real_distribution<double> ulog(lg_lo, lg_hi);
            std::uniform_real_distribution<double> ulogit(-1.0, 1.0);
            std::vector<double> lg(n);
            for (auto& v : lg) v = ulog(rng);
            std::sort(lg.begin(), lg.end());
            for (std::size_t j = 0; j + 1 < n; ++j) x0[j] = ulogit(rng);
            for (std::size_t j = 0; j < n; ++j) x0[n - 1 + j] = lg[j];
        }
        auto res = fitdetail::nelder_mead(obj, std::move(x0), 0.35, cfg.max_iters, cfg.tolerance);
        report.restart_rmse[r] = res.f;
        report.evaluations += res.evals;
        if (res.f < best.f) {
            best = std::move(res);
            report.best_restart = r;
        }
    }

    // Polish rounds: restart the descent at the incumbent with a fresh simplex.
    // A round that fails to improve is the stationarity signal.
    bool plateaued = false;
    for (int round = 0; round < 4; ++round) {
        auto res = fitdetail::nelder_mead(obj, best.x, round == 0 ? 0.05 : 0.002,
                                          8 * cfg.max_iters, cfg.tolerance);
        report.evaluations += res.evals;
        if (res.converged) best.converged = true;
        if (res.f + cfg.tolerance * (std::abs(best.f) + 1.0) >= best.f) plateaued = true;
        if (res.f < best.f) {
            const bool conv = best.converged;
            best = std::move(res);
            best.converged = best.converged || conv;
        }
        if (plateaued && round >= 1) break;
    }

    std::vector<ExpMode> modes;
    obj.decode(best.x, modes);
    std::sort(modes.begin(), modes.end(),
              [](const ExpMode& a, const ExpMode& b) { return a.gamma < b.gamma; });
    // merge near-degenerate widths to keep the strict ordering invariant
    std::vector<ExpMode> merged;
    for (const auto& m : modes) {
        if (!merged.empty() && m.gamma - merged.back().gamma <= 1e-9 * m.gamma) {
            merged.back().w += m.w;
            merged.back().gamma = m.gamma;
        } else {
            merged.push_back(m);
        }
    }
    double wsum = 0.0;
    for (auto& m : merged) wsum += m.w;
    for (auto& m : merged) m.w /= wsum;

    report.rmse = best.f;
    report.converged = (best.converged || plateaued) && std::isfinite(best.f) && best.f < 1e100;
    FitResult out{ExpModeSet(std::move(merged)), report};
    if (!report.converged)
        throw FitError("fit_prony: optimizer failed to converge after all restarts", std::move(out));
    return out;
}

}  // namespace decaylab
