#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "fractional_op.hpp"
#include "graph.hpp"
#include "parallel.hpp"
#include "soe.hpp"
#include "special.hpp"

namespace subdiff {

enum class SourceKind { ExactML, Soe };

// Squared subdiffusive distances D_vw = G_vv + G_ww - 2 G_vw with Gram form
// G = E_alpha(-t^alpha L) or its SOE approximation.
struct SubdiffusiveMetric {
    double alpha = 0.5;
    double t = 0.0;
    SourceKind source = SourceKind::ExactML;
    int J = 0;  // node count for SOE sources
    Eigen::MatrixXd gram;
    Eigen::MatrixXd D;
};

namespace detail {

inline Eigen::MatrixXd distances_from_gram(const Eigen::MatrixXd& G) {
    const Eigen::Index n = G.rows();
    Eigen::MatrixXd D(n, n);
    for (Eigen::Index v = 0; v < n; ++v)
        for (Eigen::Index w = 0; w < n; ++w) D(v, w) = (v == w) ? 0.0 : std::max(0.0, G(v, v) + G(w, w) - 2.0 * G(v, w));
    return D;
}

// Spectral multipliers g(lambda_k) for the chosen source.
inline Eigen::VectorXd source_multipliers(double alpha, double t, const SpectralLaplacian& spec,
                                          const SoeScheme* scheme) {
    const double ta = std::pow(t, alpha);
    Eigen::VectorXd g(spec.eigenvalues.size());
    for (Eigen::Index k = 0; k < g.size(); ++k) {
        const double lam = spec.eigenvalues(k);
        g(k) = scheme ? soe_scalar(*scheme, t, lam) : mittag_leffler(alpha, -ta * lam);
    }
    return g;
}

// D_vw for the graph edges only: sum_k g_k (phi_k(v) - phi_k(w))^2.
inline std::vector<double> edge_distances(const Graph& g, const SpectralLaplacian& spec, const Eigen::VectorXd& mult) {
    std::vector<double> out;
    out.reserve(g.edge_count());
    for (const auto& [u, v] : g.edges()) {
        const Eigen::VectorXd diff = (spec.eigenvectors.row(u) - spec.eigenvectors.row(v)).transpose();
        out.push_back(std::max(0.0, (diff.array().square() * mult.array()).sum()));
    }
    return out;
}

} // namespace detail

inline SubdiffusiveMetric subdiff_distance(double alpha, double t, const SpectralLaplacian& spec) {
    SubdiffusiveMetric m;
    m.alpha = alpha;
    m.t = t;
    m.gram = ml_operator(alpha, t, spec).matrix;
    m.D = detail::distances_from_gram(m.gram);
    return m;
}

inline SubdiffusiveMetric subdiff_distance(const SoeScheme& scheme, double t, const SpectralLaplacian& spec) {
    SubdiffusiveMetric m;
    m.alpha = scheme.alpha;
    m.t = t;
    m.source = SourceKind::Soe;
    m.J = scheme.J;
    m.gram = soe_operator(scheme, t, spec).matrix;
    m.D = detail::distances_from_gram(m.gram);
    return m;
}

inline double gram_min_eigenvalue(const SubdiffusiveMetric& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.gram, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

using VertexPath = std::vector<int>;

// Base graph with positive weights on its edges.
class WeightedPathGraph {
public:
    WeightedPathGraph(Graph base, std::vector<double> edge_weights)
        : base_(std::move(base)), weights_(std::move(edge_weights)), adj_(base_.n()) {
        if (weights_.size() != base_.edge_count()) throw ParameterError("one weight per edge required");
        for (std::size_t e = 0; e < weights_.size(); ++e) {
            const auto [u, v] = base_.edges()[e];
            adj_[u].push_back({v, weights_[e]});
            adj_[v].push_back({u, weights_[e]});
        }
        for (auto& nb : adj_) std::sort(nb.begin(), nb.end());
    }

    const Graph& base() const { return base_; }
    const std::vector<double>& weights() const { return weights_; }
    const std::vector<std::pair<int, double>>& neighbors(int v) const { return adj_.at(v); }

    double weight(int u, int v) const {
        for (const auto& [w, x] : adj_.at(u))
            if (w == v) return x;
        throw GraphError("no edge between " + std::to_string(u) + " and " + std::to_string(v));
    }

private:
    Graph base_;
    std::vector<double> weights_;
    std::vector<std::vector<std::pair<int, double>>> adj_;
};

// Edge weights sqrt(D_vw) on the edges of g.
inline WeightedPathGraph geometrize(const SubdiffusiveMetric& m, const Graph& g) {
    if (m.D.rows() != g.n()) throw ParameterError("metric and graph sizes differ");
    std::vector<double> w;
    w.reserve(g.edge_count());
    for (const auto& [u, v] : g.edges()) w.push_back(std::sqrt(m.D(u, v)));
    return WeightedPathGraph(g, std::move(w));
}

struct PathResult {
    VertexPath path;
    double total = 0.0;
};

// Minimum-weight path. Among paths whose totals agree to 1e-12 relative, the
// lexicographically smallest vertex sequence wins.
inline PathResult dijkstra(const WeightedPathGraph& wg, int src, int dst) {
    const int n = wg.base().n();
    if (src < 0 || dst < 0 || src >= n || dst >= n) throw ParameterError("vertex out of range");
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(n, inf);
    std::vector<int> pred(n, -1);
    std::vector<bool> done(n, false);
    auto path_to = [&](int v) {
        VertexPath p;
        for (int x = v; x != -1; x = pred[x]) p.push_back(x);
        std::reverse(p.begin(), p.end());
        return p;
    };
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    dist[src] = 0.0;
    pq.push({0.0, src});
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (done[u] || d > dist[u]) continue;
        done[u] = true;
        if (u == dst) break;
        for (const auto& [v, w] : wg.neighbors(u)) {
            if (done[v]) continue;
            const double nd = dist[u] + w;
            const double tie = 1e-12 * std::max(1.0, std::abs(nd));
            if (nd < dist[v] - tie) {
                dist[v] = nd;
                pred[v] = u;
                pq.push({nd, v});
            } else if (std::abs(nd - dist[v]) <= tie) {
                VertexPath cand = path_to(u), cur = path_to(pred[v]);
                cand.push_back(v);
                cur.push_back(v);
                if (cand < cur) pred[v] = u;
            }
        }
    }
    if (!done[dst]) throw GraphError("destination unreachable from source");
    return {path_to(dst), dist[dst]};
}

// Every shortest (hop-count) path from src to dst, in lexicographic order.
inline std::vector<VertexPath> all_geodesics(const Graph& g, int src, int dst, std::size_t cap = 10000) {
    if (src < 0 || dst < 0 || src >= g.n() || dst >= g.n()) throw ParameterError("vertex out of range");
    const auto ds = g.bfs_distances(src);
    const auto dt = g.bfs_distances(dst);
    if (ds[dst] < 0) throw GraphError("destination unreachable from source");
    const int len = ds[dst];
    std::vector<VertexPath> out;
    VertexPath cur{src};
    std::function<void(int)> walk = [&](int v) {
        if (v == dst) {
            if (out.size() >= cap) throw GraphError("geodesic count exceeds cap " + std::to_string(cap));
            out.push_back(cur);
            return;
        }
        for (int w : g.neighbors(v)) {
            if (ds[w] == ds[v] + 1 && dt[w] >= 0 && ds[w] + dt[w] == len) {
                cur.push_back(w);
                walk(w);
                cur.pop_back();
            }
        }
    };
    walk(src);
    return out;
}

// d_u + d_v - 2
inline int edge_degree(const Graph& g, int u, int v) {
    if (!g.has_edge(u, v)) throw GraphError("not an edge");
    return g.degree(u) + g.degree(v) - 2;
}

inline int path_edge_degree_sum(const Graph& g, const VertexPath& p) {
    int s = 0;
    for (std::size_t k = 1; k < p.size(); ++k) s += edge_degree(g, p[k - 1], p[k]);
    return s;
}

// First-order small-t total weight: each edge contributes
// sqrt(2) - (sqrt(2)/4) (t^alpha / Gamma(alpha+1)) (d_v + d_w + 2).
inline double path_weight_expansion(double alpha, double t, const Graph& g, const VertexPath& p) {
    const double x = std::pow(t, alpha) * gamma_recip(alpha + 1.0);
    const double r2 = std::sqrt(2.0);
    double total = 0.0;
    for (std::size_t k = 1; k < p.size(); ++k) {
        if (!g.has_edge(p[k - 1], p[k])) throw GraphError("path uses a non-edge");
        total += r2 - 0.25 * r2 * x * (g.degree(p[k - 1]) + g.degree(p[k]) + 2);
    }
    return total;
}

inline std::vector<Edge> path_edges(const VertexPath& p) {
    std::vector<Edge> e;
    for (std::size_t k = 1; k < p.size(); ++k) e.emplace_back(std::min(p[k - 1], p[k]), std::max(p[k - 1], p[k]));
    return e;
}

// Unit-cost edit distance between the edge sequences of two paths.
inline int levenshtein_paths(const VertexPath& p1, const VertexPath& p2) {
    const auto a = path_edges(p1), b = path_edges(p2);
    std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = static_cast<int>(i);
        for (std::size_t j = 1; j <= b.size(); ++j)
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

// Minimum edit distance from p to any geodesic between its endpoints. The
// minimum runs over all paths of the layered BFS DAG at once, so it equals
// the minimum over the full geodesic enumeration without materializing it.
inline int nearest_geodesic_distance(const Graph& g, const VertexPath& p) {
    if (p.empty()) throw ParameterError("empty path");
    const int src = p.front(), dst = p.back();
    const auto ds = g.bfs_distances(src);
    const auto dt = g.bfs_distances(dst);
    if (ds[dst] < 0) throw GraphError("destination unreachable from source");
    const int len = ds[dst];
    const auto pe = path_edges(p);
    const int m = static_cast<int>(pe.size());
    // Vertices on some geodesic, grouped by layer.
    std::vector<std::vector<int>> layers(len + 1);
    for (int v = 0; v < g.n(); ++v)
        if (ds[v] >= 0 && dt[v] >= 0 && ds[v] + dt[v] == len) layers[ds[v]].push_back(v);
    const int big = 1 << 28;
    std::vector<std::vector<int>> F(g.n());
    F[src].resize(m + 1);
    for (int i = 0; i <= m; ++i) F[src][i] = i;
    for (int layer = 1; layer <= len; ++layer) {
        for (int v : layers[layer]) {
            auto& f = F[v];
            f.assign(m + 1, big);
            for (int u : g.neighbors(v)) {
                if (ds[u] != layer - 1 || F[u].empty()) continue;
                const Edge e{std::min(u, v), std::max(u, v)};
                for (int i = 0; i <= m; ++i) {
                    f[i] = std::min(f[i], F[u][i] + 1);
                    if (i > 0) f[i] = std::min(f[i], F[u][i - 1] + (pe[i - 1] == e ? 0 : 1));
                }
            }
            for (int i = 1; i <= m; ++i) f[i] = std::min(f[i], f[i - 1] + 1);
        }
    }
    return F[dst][m];
}

inline bool is_geodesic(const Graph& g, const VertexPath& p) {
    if (p.empty()) return false;
    for (std::size_t k = 1; k < p.size(); ++k)
        if (!g.has_edge(p[k - 1], p[k])) return false;
    return static_cast<int>(p.size()) - 1 == g.bfs_distances(p.front())[p.back()];
}

struct PathRecord {
    double t = 0.0;
    VertexPath path;
    double weight = 0.0;
    int levenshtein = 0;
    bool geodesic = false;
};

struct PathExperiment {
    std::vector<PathRecord> records;
    std::map<Edge, int> edge_usage;

    double mean_levenshtein() const {
        if (records.empty()) return 0.0;
        double s = 0.0;
        for (const auto& r : records) s += r.levenshtein;
        return s / records.size();
    }
};

// Subdiffusive shortest path at every time of the grid. scheme == nullptr
// selects the exact Mittag-Leffler source.
inline PathExperiment path_experiment(const Graph& g, const SpectralLaplacian& spec, double alpha,
                                      const SoeScheme* scheme, const std::vector<double>& times, int src, int dst) {
    if (scheme && std::abs(scheme->alpha - alpha) > 1e-15) throw ParameterError("scheme order differs from alpha");
    PathExperiment out;
    out.records.resize(times.size());
    parallel_for(times.size(), [&](std::size_t i) {
        const double t = times[i];
        const auto mult = detail::source_multipliers(alpha, t, spec, scheme);
        auto d2 = detail::edge_distances(g, spec, mult);
        for (auto& x : d2) x = std::sqrt(x);
        WeightedPathGraph wg(g, std::move(d2));
        auto res = dijkstra(wg, src, dst);
        PathRecord r;
        r.t = t;
        r.weight = res.total;
        r.geodesic = is_geodesic(g, res.path);
        r.levenshtein = r.geodesic ? 0 : nearest_geodesic_distance(g, res.path);
        r.path = std::move(res.path);
        out.records[i] = std::move(r);
    });
    for (const auto& r : out.records)
        for (const auto& e : path_edges(r.path)) ++out.edge_usage[e];
    return out;
}

// (E_alpha(-t^alpha L))_{ij} against its leading small-t term
// t^{alpha d}/Gamma(alpha d + 1) (A^d)_{ij}, d the hop distance.
inline std::pair<double, double> small_t_entry_check(double alpha, double t, const SpectralLaplacian& spec,
                                                     const Graph& g, int i, int j) {
    const double ta = std::pow(t, alpha);
    Eigen::VectorXd ej = Eigen::VectorXd::Zero(g.n());
    ej(j) = 1.0;
    const double lhs = spec.apply_to([&](double lam) { return mittag_leffler(alpha, -ta * lam); }, ej)(i);
    const int d = g.bfs_distances(i)[j];
    if (d < 0) throw GraphError("vertices are disconnected");
    if (d == 0) return {lhs, 1.0};
    const Eigen::MatrixXd A = g.adjacency();
    Eigen::VectorXd walk = ej;
    for (int k = 0; k < d; ++k) walk = A * walk;
    const double rhs = std::pow(t, alpha * d) * gamma_recip(alpha * d + 1.0) * walk(i);
    return {lhs, rhs};
}

} // namespace subdiff
