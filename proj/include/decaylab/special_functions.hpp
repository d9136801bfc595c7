#pragma once

// Cylinder functions J1, Y1 and the Struve function H1 for nonnegative real
// arguments, self-contained (no external special-function library).
//
// Each function switches between a power series at small argument and a
// Hankel-type asymptotic expansion at large argument. The crossovers are set
// where the two truncation errors balance: x = 18 for J1/Y1 (series roundoff
// ~4e-13 with extended-precision accumulation, asymptotic remainder ~4e-15)
// and x = 24 for H1 (the H1-Y1 asymptotic difference series has remainder
// ~2*exp(-x), which first drops below 1e-10 near x = 23).

#include <cmath>
#include <limits>

#include "decaylab/errors.hpp"

namespace decaylab::specfun {

namespace detail {

inline constexpr double kJY1SeriesCutoff = 18.0;
inline constexpr double kH1SeriesCutoff = 24.0;
inline constexpr double kEulerGamma = 0.57721566490153286060651209;

inline double j1_series(double x) {
    const long double q = static_cast<long double>(x) * x / 4.0L;
    long double term = static_cast<long double>(x) / 2.0L;
    long double sum = term;
    for (int k = 0; k < 200; ++k) {
        term *= -q / (static_cast<long double>(k + 1) * (k + 2));
        sum += term;
        if (std::abs(term) < 1e-22L * std::abs(sum) + 1e-300L) break;
    }
    return static_cast<double>(sum);
}

// Y1 via the standard log-plus-series form; stable near the x -> 0 singularity.
inline double y1_series(double x) {
    const long double q = static_cast<long double>(x) * x / 4.0L;
    long double term = 1.0L;  // q^k / (k! (k+1)!)
    long double hk = 0.0L;    // harmonic number H_k
    long double hk1 = 1.0L;   // H_{k+1}
    long double sum = -2.0L * kEulerGamma + hk + hk1;
    long double sign = 1.0L;
    for (int k = 0; k < 200; ++k) {
        term *= q / (static_cast<long double>(k + 1) * (k + 2));
        sign = -sign;
        hk = hk1;
        hk1 += 1.0L / static_cast<long double>(k + 2);
        const long double t = sign * term * (-2.0L * kEulerGamma + hk + hk1);
        sum += t;
        if (std::abs(t) < 1e-22L * std::abs(sum) + 1e-300L) break;
    }
    const double pi = 3.14159265358979323846;
    return (2.0 / pi) * std::log(x / 2.0) * j1_series(x) - 2.0 / (pi * x) -
           (x / (2.0 * pi)) * static_cast<double>(sum);
}

inline double h1_series(double x) {
    const long double q = static_cast<long double>(x) * x / 4.0L;
    // first term: (x/2)^2 / (Gamma(3/2) Gamma(5/2)) = 2 x^2 / (3 pi)
    long double term = 2.0L * x * x / (3.0L * 3.141592653589793238462643383L);
    long double sum = term;
    for (int k = 0; k < 200; ++k) {
        term *= -q / ((k + 1.5L) * (k + 2.5L));
        sum += term;
        if (std::abs(term) < 1e-22L * std::abs(sum) + 1e-300L) break;
    }
    return static_cast<double>(sum);
}

// Hankel asymptotic amplitudes P, Q for order 1 (a_k coefficients with mu = 4),
// truncated at the smallest term.
inline void hankel_pq1(double x, double& p, double& q) {
    double ak = 1.0;  // a_0
    p = 1.0;
    q = 0.0;
    double xpow = x;  // x^(k)
    double prev = std::numeric_limits<double>::max();
    for (int k = 0; k < 60; ++k) {
        const double odd = 2.0 * k + 1.0;
        ak *= (4.0 - odd * odd) / (8.0 * (k + 1));
        const double term = ak / xpow;  // a_{k+1} / x^{k+1}
        if (std::abs(term) >= prev) break;
        prev = std::abs(term);
        if ((k % 2) == 0)
            q += ((k / 2) % 2 == 0 ? term : -term);
        else
            p += (((k + 1) / 2) % 2 == 0 ? term : -term);
        xpow *= x;
        if (std::abs(term) < 1e-19) break;
    }
}

inline double j1_asymptotic(double x) {
    double p, q;
    hankel_pq1(x, p, q);
    const double w = x - 2.356194490192344929;  // x - 3*pi/4
    return std::sqrt(2.0 / (3.14159265358979323846 * x)) * (p * std::cos(w) - q * std::sin(w));
}

inline double y1_asymptotic(double x) {
    double p, q;
    hankel_pq1(x, p, q);
    const double w = x - 2.356194490192344929;
    return std::sqrt(2.0 / (3.14159265358979323846 * x)) * (p * std::sin(w) + q * std::cos(w));
}

// Asymptotic series for H1(x) - Y1(x); leading term 2/pi.
inline double h1_minus_y1_asymptotic(double x) {
    const double pi = 3.14159265358979323846;
    const double r = 4.0 / (x * x);
    double term = 2.0 / pi;
    double sum = term;
    double prev = std::numeric_limits<double>::max();
    for (int k = 0; k < 60; ++k) {
        term *= (k + 0.5) * (0.5 - k) * r;
        if (std::abs(term) >= prev || std::abs(term) < 1e-19) {
            if (std::abs(term) < prev) sum += term;
            break;
        }
        prev = std::abs(term);
        sum += term;
    }
    return sum;
}

inline void require_finite_nonnegative(double x, const char* who) {
    if (!std::isfinite(x)) throw DomainError(std::string(who) + ": non-finite argument");
    if (x < 0.0) throw DomainError(std::string(who) + ": negative argument");
}

}  // namespace detail

// Bessel function of the first kind, order 1. Absolute error <= 1e-10 on [0, 50].
inline double bessel_j1(double x) {
    detail::require_finite_nonnegative(x, "bessel_j1");
    return x <= detail::kJY1SeriesCutoff ? detail::j1_series(x) : detail::j1_asymptotic(x);
}

// Bessel function of the second kind, order 1. Diverges to -inf at x = 0.
inline double bessel_y1(double x) {
    detail::require_finite_nonnegative(x, "bessel_y1");
    if (x == 0.0) throw SingularityError("bessel_y1: Y1 diverges at x = 0");
    return x <= detail::kJY1SeriesCutoff ? detail::y1_series(x) : detail::y1_asymptotic(x);
}

// Struve function H1. Nonnegative on the real axis; H1 -> Y1 + 2/pi at large x.
inline double struve_h1(double x) {
    detail::require_finite_nonnegative(x, "struve_h1");
    if (x <= detail::kH1SeriesCutoff) return detail::h1_series(x);
    return detail::y1_asymptotic(x) + detail::h1_minus_y1_asymptotic(x);
}

}  // namespace decaylab::specfun
