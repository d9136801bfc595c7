#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "decaylab/errors.hpp"

namespace decaylab {

inline std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
    if (n < 2 || !(lo < hi)) throw DomainError("linear_grid: need n >= 2 and lo < hi");
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    g.back() = hi;
    return g;
}

inline std::vector<double> geometric_grid(double lo, double hi, std::size_t n) {
    if (n < 2 || !(0.0 < lo && lo < hi)) throw DomainError("geometric_grid: need n >= 2 and 0 < lo < hi");
    std::vector<double> g(n);
    const double r = std::log(hi / lo);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = lo * std::exp(r * static_cast<double>(i) / static_cast<double>(n - 1));
    g.back() = hi;
    return g;
}

}  // namespace decaylab
