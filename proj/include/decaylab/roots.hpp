#pragma once

// Bracketed scalar root solving: bisection narrows the bracket, Newton takes
// over once the bracket is tight, with fallback to bisection whenever a Newton
// step leaves the bracket. Requires f(lo) and f(hi) of opposite sign.

#include <cmath>
#include <functional>

#include "decaylab/errors.hpp"

namespace decaylab {

struct RootOptions {
    double abs_tol = 1e-10;       // stop when the bracket is this tight
    double newton_bracket = 1e-3; // switch to Newton when bracket width falls below
    int max_iters = 200;
};

template <typename F, typename DF>
double solve_bracketed(F&& f, DF&& df, double lo, double hi, const RootOptions& opt = {}) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo < 0.0) == (fhi < 0.0))
        throw NoSolutionError("solve_bracketed: no sign change over the bracket");

    double x = 0.5 * (lo + hi);
    for (int it = 0; it < opt.max_iters; ++it) {
        if (hi - lo <= opt.newton_bracket * std::max(1.0, std::abs(hi))) {
            const double fx = f(x);
            if (fx == 0.0) return x;
            if ((fx < 0.0) == (flo < 0.0)) {
                lo = x;
                flo = fx;
            } else {
                hi = x;
            }
            const double d = df(x);
            double xn = d != 0.0 ? x - fx / d : 0.5 * (lo + hi);
            if (!(xn > lo) || !(xn < hi)) xn = 0.5 * (lo + hi);
            if (std::abs(xn - x) <= opt.abs_tol || hi - lo <= opt.abs_tol) return xn;
            x = xn;
        } else {
            const double fx = f(x);
            if (fx == 0.0) return x;
            if ((fx < 0.0) == (flo < 0.0)) {
                lo = x;
                flo = fx;
            } else {
                hi = x;
            }
            if (hi - lo <= opt.abs_tol) return 0.5 * (lo + hi);
            x = 0.5 * (lo + hi);
        }
    }
    return x;
}

}  // namespace decaylab
