#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"
#include "parallel.hpp"

namespace subdiff {

using Rng = std::mt19937_64;

// Independent stream for walk `index` of a run seeded with `seed`.
inline Rng walk_stream(std::uint64_t seed, std::uint64_t index) { return Rng(mix_seed(seed, index)); }

// One-sided alpha-stable variate with Laplace transform e^{-s^alpha} (Kanter).
inline double sample_stable(double alpha, Rng& rng) {
    detail::require(alpha > 0.0 && alpha <= 1.0, "stable index must lie in (0,1]");
    if (alpha == 1.0) return 1.0;
    std::uniform_real_distribution<double> uni(0.0, std::numbers::pi);
    std::exponential_distribution<double> ex(1.0);
    double u = uni(rng);
    while (u == 0.0) u = uni(rng);
    const double e = ex(rng);
    return std::sin(alpha * u) / std::pow(std::sin(u), 1.0 / alpha) *
           std::pow(std::sin((1.0 - alpha) * u) / e, (1.0 - alpha) / alpha);
}

// Waiting time with survival E_alpha(-d t^alpha): (E/d)^{1/alpha} S_alpha.
inline double sample_ml_waiting(double alpha, double d, Rng& rng) {
    detail::require(alpha > 0.0 && alpha <= 1.0, "waiting-time order must lie in (0,1]");
    detail::require(d > 0.0, "waiting-time rate must be > 0");
    std::exponential_distribution<double> ex(1.0);
    const double e = ex(rng);
    if (alpha == 1.0) return e / d;
    return std::pow(e / d, 1.0 / alpha) * sample_stable(alpha, rng);
}

struct Trajectory {
    int start = 0;
    double horizon = 0.0;
    std::vector<double> jump_times;
    std::vector<int> vertices;  // one longer than jump_times

    int position() const { return vertices.back(); }
    int jumps() const { return static_cast<int>(jump_times.size()); }
};

// Alternates waits at rate d_v with uniform-neighbor jumps until the next
// jump would land beyond the horizon.
inline Trajectory simulate_walk(const Graph& g, double alpha, double horizon, int start, Rng& rng) {
    if (start < 0 || start >= g.n()) throw ParameterError("start vertex out of range");
    detail::require(horizon >= 0.0, "horizon must be >= 0");
    if (g.degree(start) == 0) throw GraphError("walk starts at an isolated vertex");
    Trajectory tr;
    tr.start = start;
    tr.horizon = horizon;
    tr.vertices.push_back(start);
    double clock = 0.0;
    int v = start;
    for (;;) {
        const auto& nb = g.neighbors(v);
        clock += sample_ml_waiting(alpha, static_cast<double>(nb.size()), rng);
        if (clock > horizon) break;
        std::uniform_int_distribution<std::size_t> pick(0, nb.size() - 1);
        v = nb[pick(rng)];
        tr.jump_times.push_back(clock);
        tr.vertices.push_back(v);
    }
    return tr;
}

// Occupation distribution P[Y_t = j | Y_0 = start] from n_walks walks.
inline std::vector<double> empirical_transition(const Graph& g, double alpha, double t, int start, std::size_t n_walks,
                                                std::uint64_t seed) {
    std::vector<int> where(n_walks);
    parallel_for(n_walks, [&](std::size_t w) {
        Rng rng = walk_stream(seed, w);
        where[w] = simulate_walk(g, alpha, t, start, rng).position();
    });
    std::vector<double> p(g.n(), 0.0);
    for (int v : where) p[v] += 1.0;
    for (auto& x : p) x /= static_cast<double>(n_walks);
    return p;
}

struct McEstimate {
    double estimate = 0.0;
    double stderr_ = 0.0;
    std::size_t samples = 0;  // samples entering the estimate
    bool defined = true;
};

// P(N(t) = d(i,j) | Y_t = j, Y_0 = i) with its binomial standard error.
// Undefined (defined = false) when no walk ends at j.
inline McEstimate conditional_geodesic_prob(const Graph& g, double alpha, double t, int i, int j, std::size_t n_samples,
                                            std::uint64_t seed) {
    if (i == j) throw ParameterError("conditional geodesic probability needs i != j");
    const int dist = g.bfs_distances(i).at(j);
    if (dist < 0) throw GraphError("target unreachable from start");
    std::vector<signed char> outcome(n_samples, -1);
    parallel_for(n_samples, [&](std::size_t w) {
        Rng rng = walk_stream(seed, w);
        const auto tr = simulate_walk(g, alpha, t, i, rng);
        if (tr.position() == j) outcome[w] = tr.jumps() == dist ? 1 : 0;
    });
    McEstimate est;
    std::size_t hits = 0, events = 0;
    for (auto o : outcome)
        if (o >= 0) {
            ++events;
            hits += static_cast<std::size_t>(o);
        }
    est.samples = events;
    if (events == 0) {
        est.defined = false;
        est.estimate = std::nan("");
        est.stderr_ = std::nan("");
        return est;
    }
    est.estimate = static_cast<double>(hits) / events;
    est.stderr_ = std::sqrt(est.estimate * (1.0 - est.estimate) / events);
    return est;
}

// First-passage time of the stable subordinator over t, simulated by
// increments dtau^{1/alpha} S_alpha and interpolated on the crossing step.
inline double sample_inverse_subordinator(double alpha, double t, Rng& rng, double dtau) {
    detail::require(dtau > 0.0, "subordinator step must be > 0");
    detail::require(t >= 0.0, "time must be >= 0");
    const double scale = std::pow(dtau, 1.0 / alpha);
    double level = 0.0, tau = 0.0;
    for (;;) {
        const double inc = scale * sample_stable(alpha, rng);
        if (level + inc > t) return tau + dtau * (t - level) / inc;
        level += inc;
        tau += dtau;
    }
}

struct ClockMoments {
    double mean = 0.0;
    double mean_stderr = 0.0;
    double variance = 0.0;
    std::size_t samples = 0;
    std::vector<double> draws;
};

// Sample mean and variance of E_t; default step dtau = t/1000.
inline ClockMoments clock_moments(double alpha, double t, std::size_t n, std::uint64_t seed, double dtau = 0.0) {
    if (dtau <= 0.0) dtau = t / 1000.0;
    ClockMoments m;
    m.samples = n;
    m.draws.resize(n);
    parallel_for(n, [&](std::size_t w) {
        Rng rng = walk_stream(seed, w);
        m.draws[w] = sample_inverse_subordinator(alpha, t, rng, dtau);
    });
    double s = 0.0;
    for (double x : m.draws) s += x;
    m.mean = s / n;
    double ss = 0.0;
    for (double x : m.draws) ss += (x - m.mean) * (x - m.mean);
    m.variance = n > 1 ? ss / (n - 1) : 0.0;
    m.mean_stderr = std::sqrt(m.variance / n);
    return m;
}

inline double clock_mean_theory(double alpha, double t) { return std::pow(t, alpha) / std::tgamma(1.0 + alpha); }

inline double clock_variance_theory(double alpha, double t) {
    const double g1 = std::tgamma(1.0 + alpha);
    return 2.0 * std::pow(t, 2.0 * alpha) / std::tgamma(1.0 + 2.0 * alpha) - std::pow(t, 2.0 * alpha) / (g1 * g1);
}

} // namespace subdiff
