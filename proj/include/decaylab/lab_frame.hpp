#pragma once

// Closed-form survival probability of a moving unstable system with fixed
// linear momentum p: the exponential-mode sum transforms through the complex
// rate Upsilon = Lambda_- + i Lambda_+, and the branch/endpoint part of the
// amplitude enters through the Xi combination of J1, Y1 and H1 at argument pt.

#include <cmath>
#include <complex>

#include "decaylab/exp_modes.hpp"
#include "decaylab/special_functions.hpp"

namespace decaylab {

inline constexpr double kPi = 3.14159265358979323846;

// Lorentz factor sqrt(1 + p^2/M^2) of a mass M carrying momentum p.
inline double lorentz_gamma(double mass, double p) {
    if (!(mass > 0.0)) throw DomainError("lorentz_gamma: mass must be > 0");
    if (!(p >= 0.0)) throw DomainError("lorentz_gamma: momentum must be >= 0");
    return std::sqrt(1.0 + (p / mass) * (p / mass));
}

// Momentum and derived Lorentz factor for a given rest model.
struct LabContext {
    double p = 0.0;
    double gamma = 1.0;

    LabContext(const RestModel& model, double momentum)
        : p(momentum), gamma(lorentz_gamma(model.mass(), momentum)) {}
    LabContext(double mass, double momentum) : p(momentum), gamma(lorentz_gamma(mass, momentum)) {}
};

struct ComplexRate {
    double re = 0.0;  // decay-rate part (Lambda_-)
    double im = 0.0;  // phase-rate part (Lambda_+)

    std::complex<double> value() const { return {re, im}; }
};

struct LambdaPair {
    double lambda_minus = 0.0;
    double lambda_plus = 0.0;
};

// Lambda_-/+ = sqrt(2 (sqrt(D^2 + E^2) -/+ D)) with D = M^2 - Gamma^2/4 + p^2
// and E = M Gamma. The minus branch is evaluated as E sqrt(2/(S+D)) so that
// Lambda_- Lambda_+ = 2 M Gamma holds to rounding even for Gamma << M.
inline LambdaPair lambda_mp(double mass, double width, double p) {
    if (!(mass > 0.0)) throw DomainError("lambda_mp: mass must be > 0");
    if (!(width > 0.0)) throw DomainError("lambda_mp: width must be > 0");
    if (!(p >= 0.0)) throw DomainError("lambda_mp: momentum must be >= 0");
    const double d = mass * mass - 0.25 * width * width + p * p;
    const double e = mass * width;
    const double s = std::hypot(d, e);
    LambdaPair out;
    if (d > 0.0) {
        out.lambda_plus = std::sqrt(2.0 * (s + d));
        out.lambda_minus = 2.0 * e / out.lambda_plus;
    } else {
        out.lambda_minus = std::sqrt(2.0 * (s - d));
        out.lambda_plus = 2.0 * e / out.lambda_minus;
    }
    return out;
}

inline ComplexRate upsilon(double mass, double width, double p) {
    const auto lp = lambda_mp(mass, width, p);
    return {lp.lambda_minus, lp.lambda_plus};
}

// Transformed decay width Gamma_p = 2 |Im sqrt((M - i Gamma/2)^2 + p^2)|,
// an independent route to Lambda_-.
inline double gamma_p_exact(double mass, double width, double p) {
    if (!(mass > 0.0)) throw DomainError("gamma_p_exact: mass must be > 0");
    if (!(width > 0.0)) throw DomainError("gamma_p_exact: width must be > 0");
    if (!(p >= 0.0)) throw DomainError("gamma_p_exact: momentum must be >= 0");
    const std::complex<double> pole(mass, -0.5 * width);
    const std::complex<double> root = std::sqrt(pole * pole + p * p);
    return 2.0 * std::abs(root.imag());
}

// kappa = Gamma^2 (gamma^2 - 1) / (8 M^2 gamma^4), the relative deviation of
// Gamma_p from Gamma/gamma.
inline double bw_kappa(double mass, double width, double p) {
    if (!(mass > 0.0)) throw DomainError("bw_kappa: mass must be > 0");
    if (!(width > 0.0)) throw DomainError("bw_kappa: width must be > 0");
    const double g = lorentz_gamma(mass, p);
    const double g2 = g * g;
    return width * width * (g2 - 1.0) / (8.0 * mass * mass * g2 * g2);
}

// Xi(M, p, t) = (pi/2)(H1 - i J1) - 1 + (1 - p^2/M^2)/(1 + p^2/M^2)^2 *
//               (1 + (pi/2)(Y1 - H1)), all cylinder functions at pt.
inline std::complex<double> xi_function(double mass, double p, double t) {
    if (!(mass > 0.0)) throw DomainError("xi_function: mass must be > 0");
    if (!(p > 0.0) || !(t > 0.0))
        throw SingularityError("xi_function: requires p t > 0 (Y1 diverges at 0)");
    const double z = p * t;
    const double j1 = specfun::bessel_j1(z);
    const double y1 = specfun::bessel_y1(z);
    const double h1 = specfun::struve_h1(z);
    const double r2 = (p / mass) * (p / mass);
    const double coeff = (1.0 - r2) / ((1.0 + r2) * (1.0 + r2));
    std::complex<double> xi(0.5 * kPi * h1 - 1.0, -0.5 * kPi * j1);
    xi += coeff * (1.0 + 0.5 * kPi * (y1 - h1));
    return xi;
}

// Large-pt limit of Xi: -i sqrt(pi/(2 p t)) exp(i (p t - 3 pi/4)).
inline std::complex<double> xi_asymptotic(double p, double t) {
    const double z = p * t;
    if (!(z > 0.0)) throw DomainError("xi_asymptotic: requires p t > 0");
    const double mod = std::sqrt(0.5 * kPi / z);
    return std::polar(mod, z - 0.75 * kPi - 0.5 * kPi);
}

// Approximate transformed mode sum sum_j w_j exp(-(t/2)(Gamma_j/gamma + 2 i M gamma)).
// The common phase is factored analytically, so the modulus equals the real sum
// sum_j w_j exp(-Gamma_j t / (2 gamma)) exactly.
inline std::complex<double> exp_mode_sum_lab(const RestModel& model, const LabContext& ctx, double t) {
    if (!(t >= 0.0)) throw DomainError("exp_mode_sum_lab: t must be >= 0");
    double s = 0.0;
    for (const auto& m : model.modes().modes()) s += m.w * std::exp(-0.5 * m.gamma * t / ctx.gamma);
    return std::polar(s, -model.mass() * ctx.gamma * t);
}

struct LabOptions {
    bool clamp = false;              // clip the result into [0, 1] on request
    double validity_factor = 10.0;   // operationalizes ">>" in the regime checks
};

struct LabProbability {
    double value = 0.0;
    bool in_validity = true;   // t max(10 Gamma_1, M) >= validity_factor
    double validity_margin = 0.0;
};

// Transformed survival amplitude of the closed form (mode sum plus branch
// term). The branch term enters through the conjugate of Xi: the amplitude is
// defined with phase exp(-i sqrt(p^2+m^2) t), whose m = 0 endpoint carries
// phase -(pt + pi/4); conj(Xi) reproduces it, Xi itself belongs to the
// opposite time-sign convention. Verified against the quadrature oracle.
inline std::complex<double> lab_amplitude(const RestModel& model, const LabContext& ctx, double t) {
    if (!(t >= 0.0)) throw DomainError("lab_amplitude: t must be >= 0");
    std::complex<double> sum(0.0, 0.0);
    for (const auto& m : model.modes().modes()) {
        const auto lp = lambda_mp(model.mass(), m.gamma, ctx.p);
        sum += m.w * std::polar(std::exp(-0.5 * lp.lambda_minus * t), -0.5 * lp.lambda_plus * t);
    }
    if (ctx.p > 0.0) {
        const double coeff = ctx.p * model.modes().weighted_width_sum() / (kPi * model.mass() * model.mass());
        sum += std::complex<double>(0.0, coeff) * std::conj(xi_function(model.mass(), ctx.p, t));
    }
    return sum;
}

// Closed-form lab-frame survival probability P_p(t). Raw values may overshoot
// 1 slightly near the validity boundary; clamping is opt-in.
inline LabProbability survival_probability_lab(const RestModel& model, const LabContext& ctx,
                                               double t, const LabOptions& opt = {}) {
    const std::complex<double> a = lab_amplitude(model, ctx, t);
    LabProbability out;
    out.value = std::norm(a);
    out.validity_margin = t * std::max(10.0 * model.modes().gamma_min(), model.mass());
    out.in_validity = out.validity_margin >= opt.validity_factor;
    if (opt.clamp) out.value = std::min(1.0, std::max(0.0, out.value));
    return out;
}

// Spectral-threshold description of the long-time inverse-power-law tail.
struct TailSpec {
    double alpha = 0.0;          // threshold exponent, >= 0
    double mu0 = 1.0;            // spectral lower bound, > 0
    double omega0_at_mu0 = 1.0;  // form-factor value at the threshold

    TailSpec(double a, double m, double w) : alpha(a), mu0(m), omega0_at_mu0(w) {
        if (!(alpha >= 0.0)) throw DomainError("TailSpec: alpha must be >= 0");
        if (!(mu0 > 0.0)) throw DomainError("TailSpec: mu0 must be > 0");
        if (!(omega0_at_mu0 > 0.0)) throw DomainError("TailSpec: omega0(mu0) must be > 0");
    }
};

// chi_p = sqrt(1 + p^2/mu0^2), the long-time dilation factor.
inline double chi_factor(const TailSpec& spec, double p) {
    if (!(p >= 0.0)) throw DomainError("chi_factor: momentum must be >= 0");
    return std::sqrt(1.0 + (p / spec.mu0) * (p / spec.mu0));
}

// Long-time tail P_p(t) = (Gamma(1+alpha) omega0(mu0))^2 (chi_p/t)^(2(1+alpha)).
// Routed through the rest-frame form so the scaling identity
// power_law_tail(spec, p, t) == power_law_tail(spec, 0, t/chi_p) is bit-exact.
inline double power_law_tail_rest(const TailSpec& spec, double t) {
    if (!(t > 0.0)) throw DomainError("power_law_tail: t must be > 0");
    const double c = std::tgamma(1.0 + spec.alpha) * spec.omega0_at_mu0;
    return c * c * std::pow(t, -2.0 * (1.0 + spec.alpha));
}

inline double power_law_tail(const TailSpec& spec, double p, double t) {
    if (!(t > 0.0)) throw DomainError("power_law_tail: t must be > 0");
    return power_law_tail_rest(spec, t / chi_factor(spec, p));
}

}  // namespace decaylab
