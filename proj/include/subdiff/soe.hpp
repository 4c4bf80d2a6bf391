#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "fractional_op.hpp"
#include "graph.hpp"
#include "special.hpp"

namespace subdiff {

enum class WindowMode { General, MeanZero };

// Truncation window [theta_min, theta_max] for the subordination integral.
struct Window {
    double alpha = 0.5;
    double theta_min = 0.0;
    double theta_max = 0.0;
    double epsilon = 1e-12;
    WindowMode mode = WindowMode::General;
    double lambda2 = 0.0;  // mean-zero mode only
    double t_min = 0.0;    // mean-zero mode only

    double y_min() const { return std::log(theta_min); }
    double y_max() const { return std::log(theta_max); }
};

inline Window select_window(double alpha, double epsilon) {
    detail::require(alpha > 0.0 && alpha < 1.0, "window order must lie in (0,1)");
    detail::require(epsilon > 0.0 && epsilon < 1.0, "window tolerance must lie in (0,1)");
    const auto tc = tail_constants(alpha);
    Window w;
    w.alpha = alpha;
    w.epsilon = epsilon;
    w.theta_min = 0.5 * epsilon * std::tgamma(1.0 - alpha);
    w.theta_max = std::pow(std::log(2.0 / epsilon) / tc.c_alpha, 1.0 / tc.q_alpha);
    if (!(w.theta_min < w.theta_max)) throw ParameterError("empty window");
    return w;
}

// Window for data orthogonal to the constant mode: the spectral gap lambda2
// and the earliest time t_min of interest control the right cutoff.
inline Window select_window_mean_zero(double alpha, double epsilon, double lambda2, double t_min) {
    detail::require(lambda2 > 0.0, "mean-zero window needs lambda2 > 0");
    detail::require(t_min > 0.0, "mean-zero window needs t_min > 0");
    Window w = select_window(alpha, epsilon);
    w.mode = WindowMode::MeanZero;
    w.lambda2 = lambda2;
    w.t_min = t_min;
    w.theta_max = std::log(2.0 / epsilon) / (t_min * lambda2);
    if (!(w.theta_min < w.theta_max)) throw ParameterError("empty window");
    return w;
}

struct TailBounds {
    double left = 0.0;
    double right_general = 0.0;
    double right_gap = std::numeric_limits<double>::infinity();  // finite only for lambda > 0

    double right() const { return std::min(right_general, right_gap); }
};

// Analytic bounds on the mass of M_alpha(theta) e^{-theta t^alpha lambda}
// outside the window.
inline TailBounds tail_bounds(const Window& w, double t, double lambda) {
    const double alpha = w.alpha;
    detail::require(t >= 0.0 && lambda >= 0.0, "tail bounds need t >= 0 and lambda >= 0");
    const auto tc = tail_constants(alpha);
    TailBounds tb;

    // Left tail: M_alpha is unimodal with its mode far beyond theta_min, so its
    // supremum on [0, theta_min] is attained at an endpoint.
    const double m_sup = std::max(gamma_recip(1.0 - alpha), mwright(alpha, w.theta_min));
    const double x = std::pow(t, alpha) * lambda;
    const double span = (x > 0.0) ? -std::expm1(-x * w.theta_min) / x : w.theta_min;
    tb.left = span * m_sup;

    // Right tail with the sharp power (a-1/2)/(1-a): the amplitude constant is
    // scaled up by the ratio M/asymptote at theta_max, which decreases to 1
    // beyond theta_max for alpha > 1/2 and stays below 1 for alpha <= 1/2.
    const double tm = w.theta_max;
    const double asym = mwright_asymptotic(alpha, tm);
    const double ratio = asym > 0.0 ? mwright(alpha, tm) / asym : 1.0;
    const double amp = std::pow(2.0 * std::numbers::pi * (1.0 - alpha), -0.5) *
                       std::pow(alpha, (2.0 * alpha - 1.0) / (2.0 * (1.0 - alpha)));
    const double c_amp = amp * std::max(1.0, ratio);
    const double p_sharp = (alpha - 0.5) / (1.0 - alpha);
    tb.right_general = c_amp / (tc.q_alpha * tc.c_alpha) * std::pow(tm, p_sharp + 1.0 - tc.q_alpha) *
                       std::exp(-tc.c_alpha * std::pow(tm, tc.q_alpha));
    if (x > 0.0) tb.right_gap = std::exp(-x * tm);
    return tb;
}

// Sum-of-exponentials approximation of E_alpha(-x) = int M_alpha(theta) e^{-x theta} dtheta
// from the log-trapezoid rule on the window.
struct SoeScheme {
    double alpha = 0.5;
    Window window;
    int J = 0;
    std::vector<double> b;      // nodes, ascending
    std::vector<double> w_raw;  // h M(b) b
    std::vector<double> a;      // w_raw / mass_win
    double mass_win = 0.0;
};

inline SoeScheme build_soe(double alpha, int J, const Window& window) {
    detail::require(alpha > 0.0 && alpha < 1.0, "SOE order must lie in (0,1)");
    detail::require(J >= 1, "SOE needs J >= 1");
    detail::require(std::abs(window.alpha - alpha) < 1e-15, "window was selected for a different order");
    SoeScheme s;
    s.alpha = alpha;
    s.window = window;
    s.J = J;
    if (J == 1) {
        // Single classical exponential at the mean internal time 1/Gamma(1+alpha),
        // which matches E_alpha(-x) to first order in x.
        s.b = {gamma_recip(1.0 + alpha)};
        s.w_raw = {1.0};
        s.a = {1.0};
        s.mass_win = 1.0;
        return s;
    }
    const double y0 = window.y_min(), y1 = window.y_max();
    const double h = (y1 - y0) / (J - 1);
    s.b.resize(J);
    s.w_raw.resize(J);
    for (int j = 0; j < J; ++j) {
        const double y = (j == J - 1) ? y1 : y0 + j * h;
        s.b[j] = std::exp(y);
        s.w_raw[j] = h * mwright(alpha, s.b[j]) * s.b[j];
    }
    detail::CompensatedSum total;
    for (double w : s.w_raw) total.add(w);
    s.mass_win = total.sum;
    if (!(s.mass_win > 0.0)) throw NumericalError("SOE window carries no mass");
    s.a.resize(J);
    for (int j = 0; j < J; ++j) s.a[j] = s.w_raw[j] / s.mass_win;
    return s;
}

// g_J(lambda) = sum_j a_j e^{-b_j t^alpha lambda}
inline double soe_scalar(const SoeScheme& s, double t, double lambda) {
    const double x = std::pow(t, s.alpha) * lambda;
    detail::CompensatedSum acc;
    for (int j = 0; j < s.J; ++j) acc.add(s.a[j] * std::exp(-s.b[j] * x));
    return acc.sum;
}

// F_J(t, L) = sum_j a_j e^{-t^alpha b_j L}, assembled through the spectral
// decomposition so every heat factor shares one eigenbasis.
inline OperatorSnapshot soe_operator(const SoeScheme& s, double t, const SpectralLaplacian& spec) {
    detail::require(t >= 0.0, "time must be >= 0");
    return {s.alpha, t, spec.apply([&](double lam) { return soe_scalar(s, t, lam); })};
}

// Max of |E_alpha(-t^alpha lambda) - g_J(lambda)| on a uniform grid over
// [0, lambda_max] plus any supplied eigenvalues.
inline double scalar_error(const SoeScheme& s, double t, double lambda_max, int grid_size = 2000,
                           const Eigen::VectorXd* eigenvalues = nullptr) {
    detail::require(grid_size >= 1, "grid needs at least one point");
    detail::require(lambda_max >= 0.0, "lambda_max must be >= 0");
    const double ta = std::pow(t, s.alpha);
    auto err = [&](double lam) { return std::abs(mittag_leffler(s.alpha, -ta * lam) - soe_scalar(s, t, lam)); };
    double worst = 0.0;
    for (int i = 0; i < grid_size; ++i) {
        const double lam = grid_size == 1 ? 0.0 : lambda_max * i / (grid_size - 1);
        worst = std::max(worst, err(lam));
    }
    if (eigenvalues)
        for (Eigen::Index k = 0; k < eigenvalues->size(); ++k) worst = std::max(worst, err((*eigenvalues)(k)));
    return worst;
}

// max_k |E_alpha(-t^alpha lambda_k) - g_J(lambda_k)| over the Laplacian spectrum.
inline double spectral_error(const SoeScheme& s, double t, const SpectralLaplacian& spec) {
    const double ta = std::pow(t, s.alpha);
    double worst = 0.0;
    for (Eigen::Index k = 0; k < spec.eigenvalues.size(); ++k) {
        const double lam = spec.eigenvalues(k);
        worst = std::max(worst, std::abs(mittag_leffler(s.alpha, -ta * lam) - soe_scalar(s, t, lam)));
    }
    return worst;
}

struct ProbeErrors {
    double relerr = 0.0;
    double masserr = 0.0;
};

inline ProbeErrors probe_errors(const SoeScheme& s, double t, const SpectralLaplacian& spec,
                                const Eigen::VectorXd& u0) {
    require_state(spec, u0);
    const Eigen::VectorXd exact = solve_fde(s.alpha, t, spec, u0);
    const Eigen::VectorXd approx = spec.apply_to([&](double lam) { return soe_scalar(s, t, lam); }, u0);
    ProbeErrors e;
    const double nrm = exact.norm();
    e.relerr = nrm > 0.0 ? (exact - approx).norm() / nrm : (exact - approx).norm();
    e.masserr = std::abs(exact.sum() - approx.sum());
    return e;
}

// Normalized standard-normal probe vectors from a fixed seed.
inline std::vector<Eigen::VectorXd> make_probes(int n, int count = 8, std::uint64_t seed = 20240601) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::vector<Eigen::VectorXd> probes;
    for (int p = 0; p < count; ++p) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v(i) = nd(rng);
        probes.push_back(v / v.norm());
    }
    return probes;
}

// Worst relerr and masserr over the fixed probe set.
inline ProbeErrors max_probe_errors(const SoeScheme& s, double t, const SpectralLaplacian& spec, int count = 8,
                                    std::uint64_t seed = 20240601) {
    ProbeErrors worst;
    for (const auto& u0 : make_probes(spec.n(), count, seed)) {
        auto e = probe_errors(s, t, spec, u0);
        worst.relerr = std::max(worst.relerr, e.relerr);
        worst.masserr = std::max(worst.masserr, e.masserr);
    }
    return worst;
}

struct OperatorErrorEstimate {
    double value = 0.0;
    bool converged = false;
    int iterations = 0;
};

// ||E_alpha(-t^alpha L) - F_J(t,L)||_2 from a symmetric eigensolve of the
// assembled difference matrix. Power iteration stalls when the top error
// eigenvalues cluster, so it is only the fallback when the solver fails.
// ||E_alpha(-t^alpha L)||_2 = 1, so this is also the relative operator error.
inline OperatorErrorEstimate operator_error(const SoeScheme& s, double t, const SpectralLaplacian& spec,
                                            int iters = 200, double tol = 1e-10, std::uint64_t seed = 7) {
    const Eigen::MatrixXd diff = ml_operator(s.alpha, t, spec).matrix - soe_operator(s, t, spec).matrix;
    OperatorErrorEstimate est;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(diff, Eigen::EigenvaluesOnly);
    if (es.info() == Eigen::Success) {
        est.value = es.eigenvalues().cwiseAbs().maxCoeff();
        est.converged = true;
        return est;
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    Eigen::VectorXd x(spec.n());
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = nd(rng);
    x.normalize();
    double prev = -1.0;
    for (int k = 1; k <= iters; ++k) {
        Eigen::VectorXd y = diff * x;
        const double nrm = y.norm();
        est.iterations = k;
        est.value = nrm;
        if (nrm == 0.0) {
            est.converged = true;
            break;
        }
        x = y / nrm;
        if (prev >= 0.0 && std::abs(nrm - prev) <= tol * nrm) {
            est.converged = true;
            break;
        }
        prev = nrm;
    }
    return est;
}

// t_j = (b_j / b_p)^{1/alpha} t, with b_p the largest node. When top_k > 0,
// b_p is the largest node among the top_k heaviest weights.
inline std::vector<double> effective_times(const SoeScheme& s, double t, int top_k = 0) {
    double bp = 0.0;
    if (top_k > 0 && top_k < s.J) {
        std::vector<int> idx(s.J);
        std::iota(idx.begin(), idx.end(), 0);
        std::partial_sort(idx.begin(), idx.begin() + top_k, idx.end(),
                          [&](int i, int j) { return s.a[i] > s.a[j]; });
        for (int k = 0; k < top_k; ++k) bp = std::max(bp, s.b[idx[k]]);
    } else {
        bp = *std::max_element(s.b.begin(), s.b.end());
    }
    std::vector<double> out(s.J);
    for (int j = 0; j < s.J; ++j) out[j] = std::pow(s.b[j] / bp, 1.0 / s.alpha) * t;
    return out;
}

} // namespace subdiff
