#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "csv.hpp"
#include "ctrw.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "graph.hpp"
#include "memory.hpp"
#include "parallel.hpp"
#include "soe.hpp"
#include "special.hpp"
#include "volterra.hpp"
#include "waiting_times.hpp"

namespace subdiff {

// steps log-spaced points from lo to hi inclusive.
inline std::vector<double> log_grid(double lo, double hi, int steps) {
    detail::require(lo > 0.0 && hi >= lo, "time grid needs 0 < t_lo <= t_hi");
    detail::require(steps >= 1, "time grid needs at least one step");
    if (steps == 1) return {lo};
    std::vector<double> out(steps);
    const double a = std::log(lo), b = std::log(hi);
    for (int i = 0; i < steps; ++i) out[i] = std::exp(a + (b - a) * i / (steps - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

inline std::string join_path(const VertexPath& p) {
    std::ostringstream os;
    for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ";" : "") << p[i];
    return os.str();
}

inline CsvTable window_table(const std::vector<double>& alphas, const std::vector<double>& epsilons) {
    CsvTable t({"alpha", "epsilon", "theta_min", "y_min", "theta_max", "y_max"});
    for (double a : alphas)
        for (double e : epsilons) {
            const auto w = select_window(a, e);
            t.add(a, e, w.theta_min, w.y_min(), w.theta_max, w.y_max());
        }
    return t;
}

// Scheme coefficients sorted by normalized weight, largest first.
inline CsvTable soe_table(double alpha, double epsilon, int J) {
    const auto s = build_soe(alpha, J, select_window(alpha, epsilon));
    std::vector<int> idx(s.J);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int i, int j) { return s.a[i] > s.a[j]; });
    CsvTable t({"rank", "j", "a", "b", "w_raw"});
    for (int r = 0; r < s.J; ++r) t.add(r + 1, idx[r] + 1, s.a[idx[r]], s.b[idx[r]], s.w_raw[idx[r]]);
    return t;
}

// log10 scalar error over (alpha, t, J) plus the worst probe mass error.
inline CsvTable error_heatmap(const SpectralLaplacian& spec, const std::vector<double>& alphas,
                              const std::vector<double>& times, const std::vector<int>& Js, double epsilon,
                              int grid_size = 2000) {
    // Mass error only sees the zero modes: 1^T (E - F) u0 = sum_k (1^T phi_k)(phi_k^T u0)(E_k - F_k).
    const auto probes = make_probes(spec.n());
    const Eigen::VectorXd ones_proj = spec.eigenvectors.transpose() * Eigen::VectorXd::Ones(spec.n());
    std::vector<Eigen::VectorXd> weights;
    for (const auto& u : probes) weights.push_back(ones_proj.cwiseProduct(spec.eigenvectors.transpose() * u));

    struct Cell {
        double alpha, t;
        std::vector<double> err, mass;
    };
    std::vector<Cell> cells;
    for (double a : alphas)
        for (double t : times) cells.push_back({a, t, {}, {}});
    std::map<std::pair<double, int>, SoeScheme> schemes;
    for (double a : alphas)
        for (int J : Js) schemes.emplace(std::make_pair(a, J), build_soe(a, J, select_window(a, epsilon)));

    parallel_for(cells.size(), [&](std::size_t c) {
        auto& cell = cells[c];
        const double ta = std::pow(cell.t, cell.alpha);
        std::vector<double> lam;
        for (int i = 0; i < grid_size; ++i) lam.push_back(grid_size == 1 ? 0.0 : spec.lambda_max * i / (grid_size - 1));
        for (Eigen::Index k = 0; k < spec.eigenvalues.size(); ++k) lam.push_back(spec.eigenvalues(k));
        std::vector<double> exact(lam.size());
        for (std::size_t i = 0; i < lam.size(); ++i) exact[i] = mittag_leffler(cell.alpha, -ta * lam[i]);
        const std::size_t eig0 = static_cast<std::size_t>(grid_size);
        for (int J : Js) {
            const auto& s = schemes.at({cell.alpha, J});
            double worst = 0.0;
            Eigen::VectorXd diff(spec.eigenvalues.size());
            for (std::size_t i = 0; i < lam.size(); ++i) {
                const double d = exact[i] - soe_scalar(s, cell.t, lam[i]);
                worst = std::max(worst, std::abs(d));
                if (i >= eig0) diff(static_cast<Eigen::Index>(i - eig0)) = d;
            }
            double mass = 0.0;
            for (const auto& w : weights) mass = std::max(mass, std::abs(w.dot(diff)));
            cell.err.push_back(worst);
            cell.mass.push_back(mass);
        }
    });
    CsvTable t({"alpha", "t", "J", "scalar_error", "log10_scalar_error", "masserr"});
    for (const auto& cell : cells)
        for (std::size_t j = 0; j < Js.size(); ++j)
            t.add(cell.alpha, cell.t, Js[j], cell.err[j], std::log10(std::max(cell.err[j], 1e-300)), cell.mass[j]);
    return t;
}

inline CsvTable survival_table(const std::vector<double>& alphas, const std::vector<int>& degrees,
                               const std::vector<double>& times, double epsilon, int J,
                               TimeForm form = TimeForm::PowerAlpha) {
    CsvTable t({"alpha", "degree", "t", "S_exact", "S_soe", "pdf_soe", "hazard_soe"});
    for (double a : alphas) {
        const auto s = build_soe(a, J, select_window(a, epsilon));
        for (int d : degrees) {
            const WaitingLaw law{a, d};
            for (double x : times)
                t.add(a, d, x, survival_exact(law, x), survival_soe(s, law, x, form), pdf_soe(s, law, x, form),
                      hazard_soe(s, law, x, form));
        }
    }
    return t;
}

inline CsvTable path_records_csv(const PathExperiment& e) {
    CsvTable t({"t", "path_vertices", "path_weight", "levenshtein_to_nearest_geodesic", "is_geodesic"});
    for (const auto& r : e.records) t.add(r.t, join_path(r.path), r.weight, r.levenshtein, r.geodesic);
    return t;
}

inline CsvTable edge_usage_csv(const PathExperiment& e, const Graph& g) {
    CsvTable t({"u", "v", "uses", "edge_degree"});
    for (const auto& [edge, n] : e.edge_usage) t.add(edge.first, edge.second, n, edge_degree(g, edge.first, edge.second));
    return t;
}

inline CsvTable geodesic_inventory_csv(const Graph& g, int src, int dst) {
    CsvTable t({"index", "path_vertices", "edges", "edge_degree_sum"});
    const auto geos = all_geodesics(g, src, dst);
    for (std::size_t i = 0; i < geos.size(); ++i)
        t.add(i, join_path(geos[i]), geos[i].size() - 1, path_edge_degree_sum(g, geos[i]));
    return t;
}

// Source label: "exact" or "J<count>".
struct PathSource {
    std::string label;
    int J = 0;  // 0 selects the exact Mittag-Leffler source
};

inline std::vector<PathSource> default_path_sources() {
    return {{"J1", 1}, {"J10", 10}, {"J20", 20}, {"J40", 40}, {"exact", 0}};
}

inline std::map<std::string, PathExperiment> run_paths(const Graph& g, const SpectralLaplacian& spec, double alpha,
                                                       const std::vector<PathSource>& sources,
                                                       const std::vector<double>& times, int src, int dst,
                                                       double epsilon) {
    std::map<std::string, PathExperiment> out;
    for (const auto& ps : sources) {
        if (ps.J == 0) {
            out[ps.label] = path_experiment(g, spec, alpha, nullptr, times, src, dst);
        } else {
            const auto s = build_soe(alpha, ps.J, select_window(alpha, epsilon));
            out[ps.label] = path_experiment(g, spec, alpha, &s, times, src, dst);
        }
    }
    return out;
}

inline CsvTable paths_summary_csv(const std::map<std::string, PathExperiment>& runs, double alpha) {
    CsvTable t({"source", "alpha", "records", "mean_levenshtein", "geodesic_fraction"});
    for (const auto& [label, e] : runs) {
        std::size_t geo = 0;
        for (const auto& r : e.records) geo += r.geodesic;
        t.add(label, alpha, e.records.size(), e.mean_levenshtein(),
              e.records.empty() ? 0.0 : static_cast<double>(geo) / e.records.size());
    }
    return t;
}

// Decomposition of x_v' on [t_start, t] for the source and its neighbors,
// with u0 the unit mass at the source.
inline CsvTable memory_report(const SpectralLaplacian& spec, const Graph& g, double alpha, int source,
                              const std::vector<double>& times, int k, double t_start) {
    detail::require(alpha > 0.0 && alpha < 1.0, "memory report needs 0 < alpha < 1");
    if (source < 0 || source >= g.n()) throw ParameterError("source vertex out of range");
    Eigen::VectorXd u0 = Eigen::VectorXd::Zero(g.n());
    u0(source) = 1.0;
    std::vector<int> verts{source};
    for (int w : g.neighbors(source)) verts.push_back(w);
    CsvTable t({"vertex", "t", "k", "R", "LR", "LP", "P", "bias"});
    for (double x : times) {
        if (!(x > t_start)) throw ParameterError("memory window start must precede every report time");
        for (int v : verts) {
            const auto m = caputo_decompose_window(alpha, t_start, x - t_start, k, vertex_derivative(alpha, spec, u0, v));
            t.add(v, x, k, m.remote, m.late_past, m.early_past, m.present, to_string(memory_bias(m)));
        }
    }
    return t;
}

// Monte-Carlo estimates next to their theoretical values.
inline CsvTable ctrw_report(double alpha, double t, std::size_t n, std::uint64_t seed) {
    CsvTable tab({"quantity", "alpha", "t", "n_samples", "estimate", "stderr"});
    // Waiting-time survival at rate 1.
    std::vector<double> w(n);
    parallel_for(n, [&](std::size_t i) {
        Rng rng = walk_stream(seed, i);
        w[i] = sample_ml_waiting(alpha, 1.0, rng);
    });
    const double surv = static_cast<double>(std::count_if(w.begin(), w.end(), [&](double x) { return x > t; })) / n;
    tab.add("waiting_survival", alpha, t, n, surv, std::sqrt(surv * (1.0 - surv) / n));
    tab.add("waiting_survival_exact", alpha, t, 0, survival_exact({alpha, 1}, t), 0.0);
    if (alpha < 1.0) {
        const auto cm = clock_moments(alpha, t, n, seed + 1);
        tab.add("clock_mean", alpha, t, n, cm.mean, cm.mean_stderr);
        tab.add("clock_mean_theory", alpha, t, 0, clock_mean_theory(alpha, t), 0.0);
        tab.add("clock_variance", alpha, t, n, cm.variance, std::nan(""));
        tab.add("clock_variance_theory", alpha, t, 0, clock_variance_theory(alpha, t), 0.0);
    }
    const Graph p3(3, {{0, 1}, {1, 2}});
    const auto cg = conditional_geodesic_prob(p3, alpha, t, 0, 2, n, seed + 2);
    tab.add("conditional_geodesic_p3", alpha, t, cg.samples, cg.estimate, cg.stderr_);
    return tab;
}

// Resolvent, Laplace and multiplex identities with the bound each must meet.
inline CsvTable volterra_report(const SpectralLaplacian& spec, const std::vector<double>& alphas,
                                const std::vector<double>& freqs, const std::vector<int>& Js, double epsilon) {
    CsvTable tab({"check_name", "alpha", "s", "J", "value", "bound"});
    for (double a : alphas) {
        const auto win = select_window(a, epsilon);
        for (double s : freqs) {
            double worst = 0.0;
            for (Eigen::Index k = 0; k < spec.eigenvalues.size(); ++k)
                worst = std::max(worst, caputo_volterra_check(a, spec.eigenvalues(k), s));
            tab.add("caputo_volterra_residual", a, s, 0, worst, 1e-14);
            double first_gap = std::nan("");
            for (int J : Js) {
                const auto sc = build_soe(a, J, win);
                const auto G = g_hat_soe(sc.a, sc.b, s, spec);
                const auto K = k_hat(G, spec);
                tab.add("resolvent_identity_residual", a, s, J, resolvent_identity_residual(K, G, spec), 1e-10);
                const double gap = resolvent_gap(a, sc.a, sc.b, s, spec);
                if (std::isnan(first_gap)) first_gap = gap;
                tab.add("resolvent_gap", a, s, J, gap, first_gap);
            }
        }
        // Factorized dynamics with the SOE rates of the smallest J.
        const auto sc = build_soe(a, Js.front(), win);
        double mres = 0.0;
        for (Eigen::Index k = 0; k < spec.eigenvalues.size(); ++k)
            if (spec.eigenvalues(k) > 0.0)
                mres = std::max(mres, multiplicative_residual(sc.b, sc.a, spec.eigenvalues(k), 1.0));
        tab.add("multiplicative_residual", a, 0.0, sc.J, mres, 1e-12);
        const auto sl = build_supra_laplacian(spec, sc.b, 0.0);
        Eigen::VectorXd phi = Eigen::VectorXd::Zero(spec.n());
        phi(0) = 1.0;
        const double t = 1.0;
        const auto st = multiplex_diffuse(sl, sc.a, phi, t);
        const Eigen::VectorXd ref = spec.apply_to([&](double lam) { return soe_scalar(sc, t, lam); }, phi);
        tab.add("multiplex_decoupled_residual", a, 0.0, sc.J, (st.aggregate - ref).cwiseAbs().maxCoeff(), 1e-12);
    }
    return tab;
}

} // namespace subdiff
