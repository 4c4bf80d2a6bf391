#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "fractional_op.hpp"
#include "graph.hpp"
#include "special.hpp"

namespace subdiff {

// Four-way split of the trapezoidal Caputo approximation on a grid of k steps:
// remote past (the x'(0) term), late past (first half of the interior nodes),
// early past (second half) and present (the x'(t) term).
struct MemoryDecomposition {
    double alpha = 0.5;
    double t = 0.0;
    int k = 3;
    double h = 0.0;
    double remote = 0.0;
    double late_past = 0.0;
    double early_past = 0.0;
    double present = 0.0;

    double total() const { return remote + late_past + early_past + present; }
};

enum class MemoryBias { Remote, Recent, Neutral };

inline std::string to_string(MemoryBias b) {
    switch (b) {
        case MemoryBias::Remote: return "remote";
        case MemoryBias::Recent: return "recent";
        default: return "neutral";
    }
}

namespace detail {

inline void check_grid(int k) {
    if (k < 3 || k % 2 == 0) throw ParameterError("memory grid needs an odd k >= 3");
}

// Second difference of m^p at m: (m+1)^p - 2 m^p + (m-1)^p.
inline double second_difference(int m, double p) {
    return std::pow(m + 1.0, p) - 2.0 * std::pow(static_cast<double>(m), p) + std::pow(m - 1.0, p);
}

} // namespace detail

// Decomposition on the window [t0, t0 + span]: grid s_j = t0 + j h, h = span/k.
template <class Deriv>
MemoryDecomposition caputo_decompose_window(double alpha, double t0, double span, int k, Deriv&& deriv) {
    detail::require(alpha > 0.0 && alpha < 1.0, "decomposition order must lie in (0,1)");
    detail::require(span > 0.0, "window length must be > 0");
    detail::check_grid(k);
    MemoryDecomposition m;
    m.alpha = alpha;
    m.t = t0 + span;
    m.k = k;
    m.h = span / k;
    const double p = 2.0 - alpha;
    const double pre = std::pow(m.h, 1.0 - alpha) * gamma_recip(3.0 - alpha);
    const double kk = k;
    m.remote = pre * (std::pow(kk - 1.0, p) - (kk + alpha - 2.0) * std::pow(kk, 1.0 - alpha)) * deriv(t0);
    const int half = (k - 1) / 2;
    detail::CompensatedSum lr, lp;
    for (int j = 1; j <= k - 1; ++j) {
        const double v = detail::second_difference(k - j, p) * deriv(t0 + j * m.h);
        (j <= half ? lr : lp).add(v);
    }
    m.late_past = pre * lr.sum;
    m.early_past = pre * lp.sum;
    m.present = pre * deriv(m.t);
    return m;
}

template <class Deriv>
MemoryDecomposition caputo_decompose(double alpha, double t, int k, Deriv&& deriv) {
    detail::require(t > 0.0, "decomposition time must be > 0");
    return caputo_decompose_window(alpha, 0.0, t, k, std::forward<Deriv>(deriv));
}

// alpha -> 0 limits: R = h/2 x'(t0), LR and LP = h times the half sums, P = h/2 x'(t).
template <class Deriv>
MemoryDecomposition limit_alpha0_window(double t0, double span, int k, Deriv&& deriv) {
    detail::require(span > 0.0, "window length must be > 0");
    detail::check_grid(k);
    MemoryDecomposition m;
    m.alpha = 0.0;
    m.t = t0 + span;
    m.k = k;
    m.h = span / k;
    m.remote = 0.5 * m.h * deriv(t0);
    const int half = (k - 1) / 2;
    detail::CompensatedSum lr, lp;
    for (int j = 1; j <= k - 1; ++j) (j <= half ? lr : lp).add(deriv(t0 + j * m.h));
    m.late_past = m.h * lr.sum;
    m.early_past = m.h * lp.sum;
    m.present = 0.5 * m.h * deriv(m.t);
    return m;
}

template <class Deriv>
MemoryDecomposition limit_alpha0(double t, int k, Deriv&& deriv) {
    detail::require(t > 0.0, "decomposition time must be > 0");
    return limit_alpha0_window(0.0, t, k, std::forward<Deriv>(deriv));
}

inline MemoryBias classify_bias(double late_past, double early_past) {
    const double tol = 1e-12 * std::max({std::abs(late_past), std::abs(early_past), 1.0});
    if (late_past > early_past + tol) return MemoryBias::Remote;
    if (late_past < early_past - tol) return MemoryBias::Recent;
    return MemoryBias::Neutral;
}

inline MemoryBias memory_bias(const MemoryDecomposition& m) { return classify_bias(m.late_past, m.early_past); }

// Bias of the alpha -> 0 split on [0, t].
template <class Deriv>
MemoryBias memory_bias(double t, int k, Deriv&& deriv) {
    return memory_bias(limit_alpha0(t, k, std::forward<Deriv>(deriv)));
}

// (R + LR, LP + P) of the alpha -> 0 split.
template <class Deriv>
std::pair<double, double> past_present_split(double t, int k, Deriv&& deriv) {
    const auto m = limit_alpha0(t, k, std::forward<Deriv>(deriv));
    return {m.remote + m.late_past, m.early_past + m.present};
}

// Biases of one trajectory on the windows [t1, t2] and [t3, t4].
template <class Deriv>
std::pair<MemoryBias, MemoryBias> two_window_bias(double t1, double t2, double t3, double t4, int k, Deriv&& deriv) {
    detail::require(t1 < t2 && t2 <= t3 && t3 < t4, "windows must be ordered and disjoint");
    return {memory_bias(limit_alpha0_window(t1, t2 - t1, k, deriv)),
            memory_bias(limit_alpha0_window(t3, t4 - t3, k, deriv))};
}

// Biases of two trajectories on the shared window [t0, t0 + span].
template <class DerivI, class DerivJ>
std::pair<MemoryBias, MemoryBias> two_vertex_bias(double t0, double span, int k, DerivI&& di, DerivJ&& dj) {
    return {memory_bias(limit_alpha0_window(t0, span, k, std::forward<DerivI>(di))),
            memory_bias(limit_alpha0_window(t0, span, k, std::forward<DerivJ>(dj)))};
}

// L1 discretization of the Caputo derivative at the last sample of a uniform
// grid with step h: (h^-a / Gamma(2-a)) sum_j b_j (x_{N-j} - x_{N-j-1}),
// b_j = (j+1)^{1-a} - j^{1-a}.
inline double caputo_l1(double alpha, const std::vector<double>& x, double h) {
    detail::require(alpha > 0.0 && alpha < 1.0, "L1 order must lie in (0,1)");
    detail::require(h > 0.0 && x.size() >= 2, "L1 scheme needs h > 0 and two samples");
    const std::size_t N = x.size() - 1;
    detail::CompensatedSum acc;
    for (std::size_t j = 0; j < N; ++j) {
        const double bj = std::pow(j + 1.0, 1.0 - alpha) - std::pow(static_cast<double>(j), 1.0 - alpha);
        acc.add(bj * (x[N - j] - x[N - j - 1]));
    }
    return std::pow(h, -alpha) * gamma_recip(2.0 - alpha) * acc.sum;
}

// s -> x_v'(s) for the trajectory u(s) = E_alpha(-s^alpha L) u0.
inline auto vertex_derivative(double alpha, const SpectralLaplacian& spec, const Eigen::VectorXd& u0, int vertex) {
    return [alpha, &spec, u0, vertex](double s) { return fde_time_derivative(alpha, s, spec, u0)(vertex); };
}

struct ConvexityRecord {
    double t = 0.0;
    int vertex = 0;
    bool is_source = false;
    double d1 = 0.0;  // x'
    double d2 = 0.0;  // x''
};

// Signs of x' and x'' at the source vertex and its neighbors for u0 = e_source.
// x' is analytic; x'' is a Richardson-corrected central difference of x'.
inline std::vector<ConvexityRecord> convexity_profile(double alpha, const SpectralLaplacian& spec, const Graph& g,
                                                      int source, const std::vector<double>& t_grid) {
    if (source < 0 || source >= g.n()) throw ParameterError("source vertex out of range");
    Eigen::VectorXd u0 = Eigen::VectorXd::Zero(g.n());
    u0(source) = 1.0;
    std::vector<int> verts{source};
    for (int w : g.neighbors(source)) verts.push_back(w);
    std::vector<ConvexityRecord> out;
    for (double t : t_grid) {
        if (t < 1e-8) throw ParameterError("time too small for stable differencing");
        const double d = 1e-4 * t;
        auto deriv = [&](double s) { return fde_time_derivative(alpha, s, spec, u0); };
        const Eigen::VectorXd x1 = deriv(t);
        const Eigen::VectorXd c1 = (deriv(t + d) - deriv(t - d)) / (2.0 * d);
        const Eigen::VectorXd c2 = (deriv(t + d / 2) - deriv(t - d / 2)) / d;
        const Eigen::VectorXd x2 = (4.0 * c2 - c1) / 3.0;
        for (int v : verts) out.push_back({t, v, v == source, x1(v), x2(v)});
    }
    return out;
}

} // namespace subdiff
