#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "errors.hpp"

namespace subdiff {

// Stretched-exponential constants of the M-Wright tail.
struct TailConstants {
    double alpha;
    double c_alpha;  // (1-a) a^(a/(1-a))
    double q_alpha;  // 1/(1-a)
    double p_alpha;  // (a-2)/(2(1-a)), the bound exponent
};

inline TailConstants tail_constants(double alpha) {
    detail::require(alpha > 0.0 && alpha < 1.0, "tail constants need 0 < alpha < 1");
    const double q = 1.0 / (1.0 - alpha);
    return {alpha, (1.0 - alpha) * std::pow(alpha, alpha * q), q, (alpha - 2.0) * q / 2.0};
}

namespace detail {

inline bool is_gamma_pole(double x) { return x <= 0.0 && x == std::floor(x); }

// log|1/Gamma(x)| and the sign of 1/Gamma(x); sign 0 at the poles.
inline std::pair<double, int> log_abs_gamma_recip(double x) {
    if (is_gamma_pole(x)) return {-std::numeric_limits<double>::infinity(), 0};
    int sign = 1;
    double lg = boost::math::lgamma(x, &sign);
    return {-lg, sign};
}

// Kahan-compensated accumulator that also tracks the absolute sum, which
// measures cancellation.
struct CompensatedSum {
    double sum = 0.0, carry = 0.0, abs_sum = 0.0;
    void add(double v) {
        double y = v - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
        abs_sum += std::abs(v);
    }
};

template <class F>
double gk_integrate(F&& f, double a, double b, double tol = 1e-14) {
    if (!(b > a)) return 0.0;
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 12, tol, &err);
}

template <class F>
double ts_integrate(F&& f, double a, double b, double tol = 1e-14) {
    if (!(b > a)) return 0.0;
    thread_local boost::math::quadrature::tanh_sinh<double> integrator;
    return integrator.integrate(f, a, b, tol);
}

// E_{1,beta}(x) for beta > 1 through the beta-integral of the series.
inline double ml_alpha_one(double beta, double x);

constexpr int kSeriesCap = 500;

// Power series sum_k x^k / Gamma(alpha k + beta).
inline double ml_series(double alpha, double beta, double x) {
    CompensatedSum acc;
    double logx = std::log(std::abs(x));
    for (int k = 0; k < kSeriesCap; ++k) {
        auto [lr, s] = log_abs_gamma_recip(alpha * k + beta);
        if (s == 0) continue;
        double mag = (k == 0) ? std::exp(lr) : std::exp(k * logx + lr);
        double term = ((k % 2 == 1 && x < 0) ? -1.0 : 1.0) * s * mag;
        acc.add(term);
        if (k > 2 && mag < 1e-17 * std::abs(acc.sum)) break;
    }
    return acc.sum;
}

// Integral representation valid for 0 < alpha < 1, beta < 1 + alpha, z < 0:
// E_{a,b}(z) = int_0^inf K(chi) dchi with
// K = chi^((1-b)/a) e^{-chi^(1/a)} [chi sin(pi(1-b)) - z sin(pi(1-b+a))]
//     / (a pi (chi^2 - 2 chi z cos(a pi) + z^2)).
inline double ml_integral(double alpha, double beta, double z) {
    const double pi = std::numbers::pi;
    const double y = -z;
    const double s1 = std::sin(pi * (1.0 - beta));
    const double s2 = std::sin(pi * (1.0 - beta + alpha));
    const double ca = std::cos(alpha * pi);
    const double power = (1.0 - beta) / alpha;
    auto K = [&](double chi) {
        if (chi <= 0.0) return 0.0;
        double e = std::pow(chi, 1.0 / alpha);
        if (e > 745.0) return 0.0;
        double num = chi * s1 + y * s2;
        double den = chi * chi + 2.0 * chi * y * ca + y * y;
        return std::pow(chi, power) * std::exp(-e) * num / den;
    };
    // e^{-chi^(1/a)} < e^{-40} beyond this point.
    const double chi_max = std::pow(40.0, alpha);
    const double peak = -y * ca;
    // chi^{1/alpha} is not smooth at 0, so the first piece uses tanh-sinh.
    double total = 0.0;
    auto piece = [&](double a, double b) { return a == 0.0 ? ts_integrate(K, a, b) : gk_integrate(K, a, b); };
    if (peak > 0.0 && peak < chi_max) total = piece(0.0, peak) + piece(peak, chi_max);
    else total = piece(0.0, chi_max);
    return total / (alpha * pi);
}

inline double ml_alpha_one(double beta, double x) {
    if (beta == 1.0) return std::exp(x);
    if (std::abs(x) <= 1.5) return ml_series(1.0, beta, x);
    if (beta > 1.0) {
        auto f = [&](double s) { return std::exp(x * s) * std::pow(1.0 - s, beta - 2.0); };
        double v = beta < 2.0 ? ts_integrate(f, 0.0, 1.0) : gk_integrate(f, 0.0, 1.0);
        return v * std::exp(log_abs_gamma_recip(beta - 1.0).first);
    }
    // E_{1,b}(z) = 1/Gamma(b) + z E_{1,b+1}(z)
    auto [lr, s] = log_abs_gamma_recip(beta);
    return s * std::exp(lr) + x * ml_alpha_one(beta + 1.0, x);
}

} // namespace detail

// 1/Gamma(x); exactly 0 at the poles of Gamma.
inline double gamma_recip(double x) {
    if (detail::is_gamma_pole(x)) return 0.0;
    if (std::abs(x) < 170.0) return 1.0 / std::tgamma(x);
    auto [lr, s] = detail::log_abs_gamma_recip(x);
    return s * std::exp(lr);
}

// Two-parameter Mittag-Leffler function on the non-positive real axis.
inline double mittag_leffler_two(double alpha, double beta, double x) {
    detail::require(alpha > 0.0 && alpha <= 1.0, "Mittag-Leffler order must lie in (0,1]");
    detail::require(beta > 0.0, "Mittag-Leffler beta must be positive");
    detail::require(x <= 0.0 && std::isfinite(x), "Mittag-Leffler argument must be finite and <= 0");
    if (x == 0.0) return gamma_recip(beta);
    if (alpha == 1.0) return detail::ml_alpha_one(beta, x);
    if (std::pow(-x, 1.0 / alpha) <= 1.5) return detail::ml_series(alpha, beta, x);
    if (beta >= 1.0 + alpha)
        return (mittag_leffler_two(alpha, beta - alpha, x) - gamma_recip(beta - alpha)) / x;
    return detail::ml_integral(alpha, beta, x);
}

// E_alpha(x) for x <= 0.
inline double mittag_leffler(double alpha, double x) {
    detail::require(alpha > 0.0 && alpha <= 1.0, "Mittag-Leffler order must lie in (0,1]");
    detail::require(x <= 0.0 && std::isfinite(x), "Mittag-Leffler argument must be finite and <= 0");
    if (x == 0.0) return 1.0;
    if (alpha == 1.0) return std::exp(x);
    if (std::pow(-x, 1.0 / alpha) <= 1.5) return detail::ml_series(alpha, 1.0, x);
    return detail::ml_integral(alpha, 1.0, x);
}

// Leading stretched-exponential term of M_alpha for large theta.
inline double mwright_asymptotic(double alpha, double theta) {
    detail::require(alpha > 0.0 && alpha < 1.0, "M-Wright order must lie in (0,1)");
    const auto tc = tail_constants(alpha);
    const double amp = std::pow(2.0 * std::numbers::pi * (1.0 - alpha), -0.5) *
                       std::pow(alpha, (2.0 * alpha - 1.0) / (2.0 * (1.0 - alpha)));
    return amp * std::pow(theta, (alpha - 0.5) / (1.0 - alpha)) *
           std::exp(-tc.c_alpha * std::pow(theta, tc.q_alpha));
}

namespace detail {

struct SeriesResult {
    double value;
    double abs_sum;
    bool converged;
};

inline SeriesResult mwright_series(double alpha, double theta) {
    CompensatedSum acc;
    if (theta == 0.0) return {gamma_recip(1.0 - alpha), std::abs(gamma_recip(1.0 - alpha)), true};
    const double lt = std::log(theta);
    for (int k = 0; k < kSeriesCap; ++k) {
        const double arg = 1.0 - alpha * (k + 1);
        auto [lr, s] = log_abs_gamma_recip(arg);
        const double lbase = k * lt - std::lgamma(k + 1.0);
        if (s != 0) acc.add(((k % 2) ? -1.0 : 1.0) * s * std::exp(lbase + lr));
        // |1/Gamma(1-x)| <= Gamma(x)/pi bounds every later term, poles included.
        const double bound = std::exp(lbase + std::lgamma(alpha * (k + 1)) - std::log(std::numbers::pi));
        if (k > 2 && bound < 1e-17 * std::abs(acc.sum)) return {acc.sum, acc.abs_sum, true};
    }
    return {acc.sum, acc.abs_sum, false};
}

// M_alpha(theta) = theta^(a/(1-a)) / (pi (1-a)) int_0^pi A(phi) exp(-theta^(1/(1-a)) A(phi)) dphi,
// A(phi) = (sin(a phi)/sin phi)^(1/(1-a)) sin((1-a) phi)/sin(a phi).
inline double mwright_integral(double alpha, double theta) {
    const double q = 1.0 / (1.0 - alpha);
    const double lscale = q * std::log(theta);
    auto f = [&](double phi) {
        const double sa = std::sin(alpha * phi), s = std::sin(phi);
        if (s <= 0.0 || sa <= 0.0) return 0.0;
        const double la = q * std::log(sa / s) + std::log(std::sin((1.0 - alpha) * phi) / sa);
        const double expo = std::exp(lscale + la);
        if (expo > 745.0) return 0.0;
        return std::exp(la - expo);
    };
    const double integral = gk_integrate(f, 0.0, std::numbers::pi, 1e-13);
    return std::exp(alpha * q * std::log(theta)) * integral / (std::numbers::pi * (1.0 - alpha));
}

} // namespace detail

// M-Wright (Mainardi) density. Uses the compensated series while it is well
// conditioned and the Zolotarev-type integral representation otherwise.
inline double mwright(double alpha, double theta) {
    detail::require(alpha > 0.0 && alpha < 1.0, "M-Wright order must lie in (0,1)");
    detail::require(theta >= 0.0 && std::isfinite(theta), "M-Wright argument must be finite and >= 0");
    auto sr = detail::mwright_series(alpha, theta);
    if (sr.converged && sr.value > 0.0 && sr.abs_sum <= 1e2 * sr.value) return sr.value;
    const auto tc = tail_constants(alpha);
    if (tc.c_alpha * std::pow(theta, tc.q_alpha) > 745.0) return 0.0;
    return detail::mwright_integral(alpha, theta);
}

} // namespace subdiff
