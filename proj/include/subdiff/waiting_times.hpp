#pragma once

#include <cmath>

#include "errors.hpp"
#include "soe.hpp"
#include "special.hpp"

namespace subdiff {

// Mittag-Leffler waiting law at a vertex of degree d: S(t) = E_alpha(-d t^alpha).
struct WaitingLaw {
    double alpha = 0.5;
    int degree = 1;
};

// Time variable inside the SOE exponentials. PowerAlpha uses e^{-d t^alpha b_j},
// consistent with the exact survival; Linear uses e^{-d t b_j}.
enum class TimeForm { PowerAlpha, Linear };

inline void check_law(const WaitingLaw& law) {
    detail::require(law.alpha > 0.0 && law.alpha <= 1.0, "waiting-law order must lie in (0,1]");
    detail::require(law.degree >= 1, "waiting-law degree must be >= 1");
}

inline void check_pair(const SoeScheme& s, const WaitingLaw& law) {
    check_law(law);
    if (std::abs(s.alpha - law.alpha) > 1e-15) throw ParameterError("scheme and waiting law have different orders");
}

inline double survival_exact(const WaitingLaw& law, double t) {
    check_law(law);
    detail::require(t >= 0.0, "time must be >= 0");
    return mittag_leffler(law.alpha, -law.degree * std::pow(t, law.alpha));
}

namespace detail {

inline double clock(double alpha, double t, TimeForm form) {
    return form == TimeForm::PowerAlpha ? std::pow(t, alpha) : t;
}

// d/dt of the clock; infinite at t = 0 for the t^alpha form.
inline double clock_rate(double alpha, double t, TimeForm form) {
    return form == TimeForm::PowerAlpha ? alpha * std::pow(t, alpha - 1.0) : 1.0;
}

} // namespace detail

// sum_j w_raw_j e^{-d tau(t) b_j}
inline double survival_soe(const SoeScheme& s, const WaitingLaw& law, double t,
                           TimeForm form = TimeForm::PowerAlpha) {
    check_pair(s, law);
    detail::require(t >= 0.0, "time must be >= 0");
    const double x = law.degree * detail::clock(s.alpha, t, form);
    detail::CompensatedSum acc;
    for (int j = 0; j < s.J; ++j) acc.add(s.w_raw[j] * std::exp(-x * s.b[j]));
    return acc.sum;
}

// f = -dS/dt
inline double pdf_soe(const SoeScheme& s, const WaitingLaw& law, double t, TimeForm form = TimeForm::PowerAlpha) {
    check_pair(s, law);
    detail::require(t >= 0.0, "time must be >= 0");
    const double x = law.degree * detail::clock(s.alpha, t, form);
    detail::CompensatedSum acc;
    for (int j = 0; j < s.J; ++j) acc.add(s.w_raw[j] * s.b[j] * std::exp(-x * s.b[j]));
    return law.degree * detail::clock_rate(s.alpha, t, form) * acc.sum;
}

// h = f / S
inline double hazard_soe(const SoeScheme& s, const WaitingLaw& law, double t,
                         TimeForm form = TimeForm::PowerAlpha) {
    check_pair(s, law);
    detail::require(t >= 0.0, "time must be >= 0");
    const double x = law.degree * detail::clock(s.alpha, t, form);
    // Shift exponents by the smallest node so the ratio survives underflow.
    const double bmin = s.b.front();
    detail::CompensatedSum num, den;
    for (int j = 0; j < s.J; ++j) {
        const double e = std::exp(-x * (s.b[j] - bmin));
        num.add(s.w_raw[j] * s.b[j] * e);
        den.add(s.w_raw[j] * e);
    }
    return law.degree * detail::clock_rate(s.alpha, t, form) * num.sum / den.sum;
}

// S(t) d Gamma(1-alpha) t^alpha, which tends to 1 for heavy tails.
inline double survival_tail_check(const WaitingLaw& law, double t_big) {
    check_law(law);
    detail::require(law.alpha < 1.0, "the power-law tail needs alpha < 1");
    detail::require(t_big > 0.0, "time must be > 0");
    return survival_exact(law, t_big) * law.degree * std::tgamma(1.0 - law.alpha) * std::pow(t_big, law.alpha);
}

} // namespace subdiff
