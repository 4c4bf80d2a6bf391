#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "parallel.hpp"

namespace subdiff {

using Edge = std::pair<int, int>;  // stored with first < second
using Point = std::array<double, 2>;

// Simple undirected graph on vertices 0..n-1 with optional planar coordinates.
class Graph {
public:
    Graph() = default;

    // Validates and canonicalizes the edges (u < v, sorted). Throws
    // GraphError on self-loops, duplicates or out-of-range endpoints.
    Graph(int n, std::vector<Edge> edges, std::optional<std::vector<Point>> coords = std::nullopt)
        : n_(n), edges_(std::move(edges)), coords_(std::move(coords)) {
        if (n_ < 0) throw GraphError("negative vertex count");
        for (auto& e : edges_) {
            if (e.first < 0 || e.second < 0 || e.first >= n_ || e.second >= n_)
                throw GraphError("edge endpoint out of range");
            if (e.first == e.second) throw GraphError("self-loop at vertex " + std::to_string(e.first));
            if (e.first > e.second) std::swap(e.first, e.second);
        }
        std::sort(edges_.begin(), edges_.end());
        if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
            throw GraphError("duplicate edge");
        if (coords_ && static_cast<int>(coords_->size()) != n_)
            throw GraphError("coordinate count does not match vertex count");
        adj_.assign(n_, {});
        for (const auto& [u, v] : edges_) {
            adj_[u].push_back(v);
            adj_[v].push_back(u);
        }
        for (auto& nb : adj_) std::sort(nb.begin(), nb.end());
    }

    int n() const noexcept { return n_; }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const std::vector<int>& neighbors(int v) const { return adj_.at(v); }
    int degree(int v) const { return static_cast<int>(adj_.at(v).size()); }
    const std::optional<std::vector<Point>>& coords() const noexcept { return coords_; }

    bool has_edge(int u, int v) const {
        if (u < 0 || v < 0 || u >= n_ || v >= n_) return false;
        const auto& nb = adj_[u];
        return std::binary_search(nb.begin(), nb.end(), v);
    }

    Eigen::MatrixXd adjacency() const {
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_, n_);
        for (const auto& [u, v] : edges_) a(u, v) = a(v, u) = 1.0;
        return a;
    }

    // Hop distances from src (-1 for unreachable vertices).
    std::vector<int> bfs_distances(int src) const {
        std::vector<int> dist(n_, -1);
        std::queue<int> q;
        dist.at(src) = 0;
        q.push(src);
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (int w : adj_[u])
                if (dist[w] < 0) {
                    dist[w] = dist[u] + 1;
                    q.push(w);
                }
        }
        return dist;
    }

    bool connected() const {
        if (n_ == 0) return false;
        auto d = bfs_distances(0);
        return std::none_of(d.begin(), d.end(), [](int x) { return x < 0; });
    }

    friend bool operator==(const Graph& a, const Graph& b) {
        return a.n_ == b.n_ && a.edges_ == b.edges_;
    }

private:
    int n_ = 0;
    std::vector<Edge> edges_;
    std::optional<std::vector<Point>> coords_;
    std::vector<std::vector<int>> adj_;
};

// L = D - A with its full symmetric eigendecomposition (ascending eigenvalues).
struct SpectralLaplacian {
    Eigen::MatrixXd L;
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;
    double lambda_max = 0.0;

    int n() const { return static_cast<int>(L.rows()); }

    // V diag(f(lambda)) V^T for a scalar spectral map f.
    template <class F>
    Eigen::MatrixXd apply(F&& f) const {
        Eigen::VectorXd g(eigenvalues.size());
        for (Eigen::Index k = 0; k < g.size(); ++k) g(k) = f(eigenvalues(k));
        return eigenvectors * g.asDiagonal() * eigenvectors.transpose();
    }

    // V diag(f(lambda)) V^T u without forming the matrix.
    template <class F>
    Eigen::VectorXd apply_to(F&& f, const Eigen::VectorXd& u) const {
        Eigen::VectorXd c = eigenvectors.transpose() * u;
        for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= f(eigenvalues(k));
        return eigenvectors * c;
    }
};

inline SpectralLaplacian laplacian(const Graph& g) {
    if (g.n() == 0) throw GraphError("empty graph has no Laplacian");
    SpectralLaplacian s;
    s.L = -g.adjacency();
    for (int v = 0; v < g.n(); ++v) s.L(v, v) = g.degree(v);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.L);
    if (es.info() != Eigen::Success) throw NumericalError("symmetric eigensolver failed");
    s.eigenvalues = es.eigenvalues();
    s.eigenvectors = es.eigenvectors();
    s.lambda_max = s.eigenvalues(s.eigenvalues.size() - 1);
    const double floor = 1e-10 * std::max(1.0, s.lambda_max);
    for (Eigen::Index k = 0; k < s.eigenvalues.size(); ++k)
        if (std::abs(s.eigenvalues(k)) < floor) s.eigenvalues(k) = 0.0;
    s.eigenvalues(0) = std::max(0.0, s.eigenvalues(0));
    return s;
}

// Uniform sample of m distinct vertex pairs. With require_connected, the
// sample is redrawn from a derived seed until connected (at most 1000 tries).
inline Graph gen_erdos_renyi(int n, long long m, std::uint64_t seed, bool require_connected = true) {
    if (n < 1) throw ParameterError("Erdos-Renyi graph needs n >= 1");
    const long long max_m = static_cast<long long>(n) * (n - 1) / 2;
    if (m < 0 || m > max_m) throw ParameterError("edge count exceeds n(n-1)/2");
    if (require_connected && m < n - 1)
        throw GraphError("cannot be connected with fewer than n-1 edges");
    constexpr int max_attempts = 1000;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(attempt)));
        std::uniform_int_distribution<int> pick(0, n - 1);
        std::set<Edge> chosen;
        while (static_cast<long long>(chosen.size()) < m) {
            int u = pick(rng), v = pick(rng);
            if (u == v) continue;
            chosen.emplace(std::min(u, v), std::max(u, v));
        }
        Graph g(n, std::vector<Edge>(chosen.begin(), chosen.end()));
        if (!require_connected || g.connected()) return g;
    }
    throw GraphError("no connected Erdos-Renyi sample within the retry budget");
}

// Gabriel graph on the given points: (v,w) is an edge iff no third point lies
// in the closed disk with diameter vw.
inline Graph gabriel_graph(const std::vector<Point>& pts) {
    const int n = static_cast<int>(pts.size());
    std::vector<Edge> edges;
    for (int v = 0; v < n; ++v) {
        for (int w = v + 1; w < n; ++w) {
            const double mx = 0.5 * (pts[v][0] + pts[w][0]);
            const double my = 0.5 * (pts[v][1] + pts[w][1]);
            const double dx = pts[v][0] - pts[w][0], dy = pts[v][1] - pts[w][1];
            const double r2 = 0.25 * (dx * dx + dy * dy);
            bool empty = true;
            for (int p = 0; p < n && empty; ++p) {
                if (p == v || p == w) continue;
                const double ex = pts[p][0] - mx, ey = pts[p][1] - my;
                if (ex * ex + ey * ey <= r2 + 1e-12) empty = false;
            }
            if (empty) edges.emplace_back(v, w);
        }
    }
    return Graph(n, std::move(edges), pts);
}

// n points uniform in the 2:1 rectangle [0,2] x [0,1], then the Gabriel graph.
inline Graph gen_gabriel(int n, std::uint64_t seed) {
    if (n < 2) throw ParameterError("Gabriel graph needs n >= 2");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(0.0, 2.0), uy(0.0, 1.0);
    std::vector<Point> pts(n);
    for (auto& p : pts) {
        p[0] = ux(rng);
        p[1] = uy(rng);
    }
    return gabriel_graph(pts);
}

namespace detail {

inline std::string strip_comment(const std::string& line) {
    auto pos = line.find('#');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

inline bool blank(const std::string& s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

inline std::filesystem::path coords_path_for(const std::filesystem::path& edges) {
    auto p = edges;
    p += ".coords.csv";
    return p;
}

// Writes via a sibling temporary file and a rename so readers never see a
// partially written file.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out) throw Error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

} // namespace detail

// Reads "u v" lines ('#' comments, blank lines ignored). The vertex count is
// max index + 1 unless a "# n <count>" header is present. Coordinates are
// read from "<path>.coords.csv" when that file exists.
inline Graph read_edge_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    std::vector<Edge> edges;
    std::set<Edge> seen;
    int declared_n = -1, max_index = -1;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        {
            std::istringstream hs(line);
            std::string hash, key;
            long long count;
            if (hs >> hash >> key >> count && hash == "#" && key == "n") {
                if (count < 0) throw ParseError("negative vertex count", lineno);
                declared_n = static_cast<int>(count);
                continue;
            }
        }
        std::string body = detail::strip_comment(line);
        if (detail::blank(body)) continue;
        std::istringstream ls(body);
        long long u, v;
        std::string extra;
        if (!(ls >> u >> v) || (ls >> extra)) throw ParseError("expected two vertex indices", lineno);
        if (u < 0 || v < 0 || u > 100000000 || v > 100000000)
            throw ParseError("vertex index out of range", lineno);
        if (u == v) throw ParseError("self-loop at vertex " + std::to_string(u), lineno);
        Edge e{static_cast<int>(std::min(u, v)), static_cast<int>(std::max(u, v))};
        if (!seen.insert(e).second) throw ParseError("duplicate edge", lineno);
        if (declared_n >= 0 && e.second >= declared_n) throw ParseError("vertex index out of range", lineno);
        max_index = std::max(max_index, e.second);
        edges.push_back(e);
    }
    const int n = declared_n >= 0 ? declared_n : max_index + 1;

    std::optional<std::vector<Point>> coords;
    auto cpath = detail::coords_path_for(path);
    if (std::filesystem::exists(cpath)) {
        std::ifstream cin_(cpath);
        std::vector<Point> pts(n);
        std::vector<bool> filled(n, false);
        std::size_t cl = 0;
        while (std::getline(cin_, line)) {
            ++cl;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (cl == 1 && line.rfind("vertex", 0) == 0) continue;
            if (detail::blank(line)) continue;
            std::replace(line.begin(), line.end(), ',', ' ');
            std::istringstream ls(line);
            long long v;
            double x, y;
            if (!(ls >> v >> x >> y)) throw ParseError("malformed coordinate row in " + cpath.string(), cl);
            if (v < 0 || v >= n) throw ParseError("coordinate vertex out of range", cl);
            pts[v] = {x, y};
            filled[v] = true;
        }
        if (std::all_of(filled.begin(), filled.end(), [](bool b) { return b; })) coords = std::move(pts);
        else throw ParseError("coordinates file does not cover every vertex: " + cpath.string());
    }
    return Graph(n, std::move(edges), std::move(coords));
}

inline void write_edge_list(const Graph& g, const std::filesystem::path& path) {
    std::ostringstream os;
    os << "# n " << g.n() << '\n';
    for (const auto& [u, v] : g.edges()) os << u << ' ' << v << '\n';
    detail::atomic_write(path, os.str());
    if (g.coords()) {
        std::ostringstream cs;
        cs.precision(17);
        cs << "vertex,x,y\n";
        for (int v = 0; v < g.n(); ++v) cs << v << ',' << (*g.coords())[v][0] << ',' << (*g.coords())[v][1] << '\n';
        detail::atomic_write(detail::coords_path_for(path), cs.str());
    }
}

} // namespace subdiff
