#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "errors.hpp"
#include "graph.hpp"
#include "special.hpp"

namespace subdiff {

// Dense propagator matrix at (alpha, t). alpha = 1 marks the heat semigroup.
struct OperatorSnapshot {
    double alpha = 1.0;
    double t = 0.0;
    Eigen::MatrixXd matrix;
};

// e^{-sL}
inline OperatorSnapshot heat_operator(double s, const SpectralLaplacian& spec) {
    detail::require(s >= 0.0 && std::isfinite(s), "heat semigroup time must be >= 0");
    return {1.0, s, spec.apply([s](double lam) { return std::exp(-s * lam); })};
}

// E_alpha(-t^alpha L)
inline OperatorSnapshot ml_operator(double alpha, double t, const SpectralLaplacian& spec) {
    detail::require(alpha > 0.0 && alpha <= 1.0, "order must lie in (0,1]");
    detail::require(t >= 0.0 && std::isfinite(t), "time must be >= 0");
    if (alpha == 1.0) return heat_operator(t, spec);
    const double ta = std::pow(t, alpha);
    return {alpha, t, spec.apply([&](double lam) { return mittag_leffler(alpha, -ta * lam); })};
}

inline void require_state(const SpectralLaplacian& spec, const Eigen::VectorXd& u0) {
    if (u0.size() != spec.n()) throw ParameterError("state vector length does not match the graph");
}

// u(t) = E_alpha(-t^alpha L) u0
inline Eigen::VectorXd solve_fde(double alpha, double t, const SpectralLaplacian& spec, const Eigen::VectorXd& u0) {
    detail::require(alpha > 0.0 && alpha <= 1.0, "order must lie in (0,1]");
    detail::require(t >= 0.0 && std::isfinite(t), "time must be >= 0");
    require_state(spec, u0);
    const double ta = std::pow(t, alpha);
    return spec.apply_to([&](double lam) { return mittag_leffler(alpha, -ta * lam); }, u0);
}

// du/dt = -t^{alpha-1} V diag(lambda E_{alpha,alpha}(-t^alpha lambda)) V^T u0.
inline Eigen::VectorXd fde_time_derivative(double alpha, double t, const SpectralLaplacian& spec,
                                           const Eigen::VectorXd& u0) {
    detail::require(alpha > 0.0 && alpha <= 1.0, "order must lie in (0,1]");
    require_state(spec, u0);
    if (!(t > 0.0)) throw ParameterError("time derivative is singular at t = 0");
    const double ta = std::pow(t, alpha);
    const double pre = std::pow(t, alpha - 1.0);
    return spec.apply_to(
        [&](double lam) {
            if (lam == 0.0) return 0.0;
            return -pre * lam * mittag_leffler_two(alpha, alpha, -ta * lam);
        },
        u0);
}

} // namespace subdiff
