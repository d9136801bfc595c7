#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <cmath>

#include "decaylab/grid.hpp"
#include "decaylab/windows.hpp"

using namespace decaylab;
using Catch::Approx;

TEST_CASE("k_function values") {
    CHECK(k_function(0.0) == 0.0);
    CHECK(k_function(0.5) == Approx(0.4289).margin(1e-4));
    CHECK(k_function(1.0) == Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK_THROWS_AS(k_function(-0.1), DomainError);
}

TEST_CASE("solve_zeta_bounds reproduces the threshold roots") {
    const auto t0 = std::chrono::steady_clock::now();
    const auto zb = solve_zeta_bounds(1e-2);
    const auto dt = std::chrono::steady_clock::now() - t0;
    CHECK(std::chrono::duration<double>(dt).count() < 1e-3);

    CHECK(zb.zeta_min == Approx(1.000200060e-4).epsilon(1e-6));
    CHECK(zb.zeta_max == Approx(5.4533).epsilon(1e-4));
    CHECK(zb.zeta_min / zb.zeta_max == Approx(1.83e-5).epsilon(1e-2));
    // residuals: the roots actually solve K(zeta) = threshold
    CHECK(k_function(zb.zeta_min) == Approx(1e-2).margin(1e-8));
    CHECK(k_function(zb.zeta_max) == Approx(1e-2).margin(1e-10));

    // threshold near the maximum: both roots collapse to 1/2
    const double kmax = k_function(0.5);
    const auto near = solve_zeta_bounds(kmax * (1.0 - 1e-10));
    CHECK(near.zeta_min == Approx(0.5).margin(1e-4));
    CHECK(near.zeta_max == Approx(0.5).margin(1e-4));
    CHECK_THROWS_AS(solve_zeta_bounds(kmax * 1.01), NoSolutionError);
    CHECK_THROWS_AS(solve_zeta_bounds(0.0), NoSolutionError);
}

TEST_CASE("K stays above threshold exactly on [zeta_min, zeta_max]") {
    const auto zb = solve_zeta_bounds(1e-2);
    for (double z : geometric_grid(zb.zeta_min, zb.zeta_max, 400)) {
        CHECK(k_function(z) >= zb.threshold * (1.0 - 1e-9));
        CHECK(k_function(z) <= k_function(0.5) * (1.0 + 1e-15));
    }
    CHECK(k_function(zb.zeta_min * 0.5) < zb.threshold);
    CHECK(k_function(zb.zeta_max * 1.5) < zb.threshold);
}

TEST_CASE("xi_parameters: structure and magnitudes") {
    const double M = 1.0, G = 1e-4;
    const RestModel model(ExpModeSet({{1.0, G}}), M);
    const LabContext ctx(model, std::sqrt(3.0));  // gamma = 2
    const auto xi = xi_parameters(model, ctx);
    REQUIRE(xi.size() == 1);
    const double expect = (G / (2.0 * M)) * std::sqrt(G / (kPi * M) * std::sqrt(1.0 - 0.25));
    CHECK(xi[0] == Approx(expect).epsilon(1e-12));
    CHECK(xi[0] == Approx(2.63e-7).epsilon(2e-2));

    // xi -> 0 as p -> 0+ (monotone through the sqrt(1 - 1/gamma^2) factor)
    const double xi_tiny = xi_parameters(model, LabContext(model, 1e-4))[0];
    const double xi_small = xi_parameters(model, LabContext(model, 1e-2))[0];
    CHECK(xi_tiny < xi_small);
    CHECK(xi_small < xi[0]);
    CHECK(xi_tiny <= 3e-9);

    // nonrelativistic limit excluded
    const LabContext at_rest(model, 0.0);
    CHECK_THROWS_AS(xi_parameters(model, at_rest), ExcludedRegimeError);
}

TEST_CASE("dominant_indices selection") {
    CHECK(dominant_indices({1e-6, 1e-6, 1e-6}) == std::vector<std::size_t>{1, 2, 3});
    CHECK(dominant_indices({1e-6, 5e-3}) == std::vector<std::size_t>{1});
    CHECK(dominant_indices({1e-2, 2e-2}).empty());
    CHECK_THROWS_AS(dominant_indices({1e-6}, 1.5), DomainError);
}

TEST_CASE("exponential_window: single mode") {
    const double M = 1.0, G = 1e-5;
    const RestModel model(ExpModeSet({{1.0, G}}), M);
    const LabContext ctx(model, std::sqrt(3.0));
    const auto zb = solve_zeta_bounds(1e-2);
    const auto rep = exponential_window(model, ctx, zb);
    REQUIRE(rep.dominant_indices == std::vector<std::size_t>{1});
    REQUIRE(rep.window_lab.size() == 1);
    CHECK(rep.closed_interval);
    CHECK(rep.window_lab.inf() == Approx(2.0 * zb.zeta_min * ctx.gamma / G).epsilon(1e-12));
    CHECK(rep.window_lab.sup() == Approx(2.0 * zb.zeta_max * ctx.gamma / G).epsilon(1e-12));
    CHECK(rep.window_rest.inf() == Approx(2.0 * zb.zeta_min / G).epsilon(1e-12));
    // frame covariance is exact by construction
    CHECK(rep.window_lab.inf() == ctx.gamma * rep.window_rest.inf());
    CHECK(rep.window_lab.sup() == ctx.gamma * rep.window_rest.sup());
}

TEST_CASE("two dominant modes with moderate width ratio give one closed interval") {
    const double M = 1.0;
    const RestModel model(ExpModeSet({{0.5, 1e-6}, {0.5, 1e-5}}), M);
    const LabContext ctx(model, std::sqrt(3.0));
    const auto zb = solve_zeta_bounds(1e-2);
    const auto rep = exponential_window(model, ctx, zb);
    REQUIRE(rep.dominant_indices.size() == 2);
    CHECK(rep.closed_interval);  // ratio 0.1 > zeta_min/zeta_max ~ 1.83e-5
    CHECK(rep.window_lab.inf() == Approx(2.0 * zb.zeta_min * ctx.gamma / 1e-5).epsilon(1e-12));
    CHECK(rep.window_lab.sup() == Approx(2.0 * zb.zeta_max * ctx.gamma / 1e-6).epsilon(1e-12));
    // dilation of interval lengths, exact to rounding
    CHECK(rep.window_lab.total_length() ==
          Approx(ctx.gamma * rep.window_rest.total_length()).epsilon(1e-14));
}

TEST_CASE("empty dominant set yields diagnostics, not an exception") {
    // large widths relative to M push every xi above the cut
    const RestModel model(ExpModeSet({{0.5, 0.5e-2}, {0.5, 1e-2}}), 1.0, 1e-2);
    const LabContext ctx(model, std::sqrt(3.0));
    const auto zb = solve_zeta_bounds(1e-2);
    const auto rep = exponential_window(model, ctx, zb);
    CHECK(rep.dominant_indices.empty());
    CHECK(rep.window_lab.empty());
    CHECK(rep.min_failing_xi > 1e-4);
    CHECK(rep.admitting_dominance_factor >= rep.min_failing_xi / 1e-2 * (1.0 - 1e-12));
}

TEST_CASE("interval set normalization is idempotent and merges overlaps") {
    IntervalSet s({{3.0, 5.0}, {1.0, 2.0}, {4.5, 8.0}, {2.0, 2.5}});
    REQUIRE(s.size() == 2);  // [1, 2.5] and [3, 8]
    CHECK(s.intervals()[0].lo == 1.0);
    CHECK(s.intervals()[0].hi == 2.5);
    CHECK(s.intervals()[1].lo == 3.0);
    CHECK(s.intervals()[1].hi == 8.0);
    const IntervalSet again(std::vector<Interval>(s.intervals()));
    REQUIRE(again.size() == s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(again.intervals()[i].lo == s.intervals()[i].lo);
        CHECK(again.intervals()[i].hi == s.intervals()[i].hi);
    }
    CHECK(s.contains(2.25));
    CHECK_FALSE(s.contains(2.75));

    const auto sc = s.scaled(2.0);
    REQUIRE(sc.size() == s.size());
    CHECK(sc.inf() == 2.0 * s.inf());
    CHECK(sc.sup() == 2.0 * s.sup());
}

TEST_CASE("window dominance: mode sum beats the power-law bound across I_p") {
    const double M = 1.0;
    const RestModel model(ExpModeSet({{0.3, 1e-6}, {0.7, 1e-5}}), M);
    const LabContext ctx(model, std::sqrt(3.0));
    const auto zb = solve_zeta_bounds(1e-2);
    const auto rep = exponential_window(model, ctx, zb);
    REQUIRE_FALSE(rep.window_lab.empty());
    const double coeff = ctx.p * model.modes().weighted_width_sum() / (kPi * M * M);
    for (double t : geometric_grid(rep.window_lab.inf(), rep.window_lab.sup(), 300)) {
        const double bound = coeff * std::sqrt(0.5 * kPi / (ctx.p * t));
        const double mode_sum = std::abs(exp_mode_sum_lab(model, ctx, t));
        REQUIRE(mode_sum >= (1.0 / rep.dominance_factor) * bound * (1.0 - 1e-9));
    }
}

TEST_CASE("dominant_mode_decay tracks the closed form within 5% on I_p") {
    const double M = 1.0;
    // widths separated by a factor 10, balanced weights; all dominant
    const RestModel model(ExpModeSet({{0.3, 1e-6}, {0.7, 1e-5}}), M);
    const LabContext ctx(model, std::sqrt(3.0));
    const auto zb = solve_zeta_bounds(1e-2);
    const auto rep = exponential_window(model, ctx, zb);
    REQUIRE(rep.dominant_indices.size() == 2);
    for (double t : geometric_grid(rep.window_lab.inf(), rep.window_lab.sup(), 400)) {
        const double dd = dominant_mode_decay(model, ctx, rep, t);
        const double full = survival_probability_lab(model, ctx, t).value;
        REQUIRE(std::abs(dd - full) / full <= 0.05);
    }
    CHECK_THROWS_AS(dominant_mode_decay(model, ctx, rep, rep.window_lab.sup() * 2.0),
                    OutOfWindowError);
}

TEST_CASE("dominant_mode_decay includes every mode in interval overlaps") {
    const double M = 1.0;
    const RestModel model(ExpModeSet({{0.4, 1e-6}, {0.6, 1e-5}}), M);
    const LabContext ctx(model, std::sqrt(3.0));
    const auto rep = exponential_window(model, ctx, solve_zeta_bounds(1e-2));
    REQUIRE(rep.dominant_indices.size() == 2);
    // a time inside both per-mode intervals
    const double t = std::max(rep.mode_intervals_lab[0].lo, rep.mode_intervals_lab[1].lo) * 2.0;
    REQUIRE(rep.mode_intervals_lab[0].contains(t));
    REQUIRE(rep.mode_intervals_lab[1].contains(t));
    const double expect = 0.4 * std::exp(-0.5e-6 * t / ctx.gamma) +
                          0.6 * std::exp(-0.5e-5 * t / ctx.gamma);
    CHECK(dominant_mode_decay(model, ctx, rep, t) == Approx(expect * expect).epsilon(1e-12));
}

TEST_CASE("dominant_mode_decay: single mode and frame twins") {
    const double M = 1.0, G = 1e-5;
    const RestModel model(ExpModeSet({{1.0, G}}), M);
    const LabContext ctx(model, std::sqrt(3.0));
    const auto rep = exponential_window(model, ctx, solve_zeta_bounds(1e-2));
    const double t = 0.5 * (rep.window_lab.inf() + rep.window_lab.sup());
    CHECK(dominant_mode_decay(model, ctx, rep, t) ==
          Approx(std::exp(-G * t / ctx.gamma)).epsilon(1e-12));
    // rest-frame twin: substitute t -> t/gamma via the rest window
    const double t0 = t / ctx.gamma;
    CHECK(rep.window_rest.contains(t0));
    CHECK(std::exp(-G * t0) == Approx(dominant_mode_decay(model, ctx, rep, t)).epsilon(1e-12));
}
