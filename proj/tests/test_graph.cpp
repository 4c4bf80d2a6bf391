#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include <subdiff/graph.hpp>

using namespace subdiff;
using Catch::Approx;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "subdiff_graph_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

void write_text(const std::filesystem::path& p, const std::string& s) {
    std::ofstream(p) << s;
}

void check_spectral_invariants(const Graph& g) {
    const auto s = laplacian(g);
    const double lm = s.lambda_max;
    REQUIRE((s.L * Eigen::VectorXd::Ones(g.n())).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, lm));
    REQUIRE(s.eigenvalues(0) == 0.0);
    const Eigen::MatrixXd rec = s.eigenvectors * s.eigenvalues.asDiagonal() * s.eigenvectors.transpose();
    REQUIRE((rec - s.L).cwiseAbs().maxCoeff() <= 1e-10 * lm);
    const Eigen::MatrixXd gram = s.eigenvectors.transpose() * s.eigenvectors;
    REQUIRE((gram - Eigen::MatrixXd::Identity(g.n(), g.n())).cwiseAbs().maxCoeff() <= 1e-10);
    double degree_sum = 0.0;
    for (int v = 0; v < g.n(); ++v) degree_sum += g.degree(v);
    REQUIRE(s.eigenvalues.sum() == Approx(degree_sum).epsilon(1e-8));
    if (g.connected()) REQUIRE(s.eigenvalues(1) > 0.0);
}

} // namespace

TEST_CASE("two-vertex path Laplacian", "[graph]") {
    const Graph g(2, {{0, 1}});
    const auto s = laplacian(g);
    REQUIRE(s.L(0, 0) == 1.0);
    REQUIRE(s.L(0, 1) == -1.0);
    REQUIRE(s.eigenvalues(0) == 0.0);
    REQUIRE(s.eigenvalues(1) == Approx(2.0).epsilon(1e-14));
}

TEST_CASE("triangle spectrum is {0,3,3}", "[graph]") {
    const auto s = laplacian(Graph(3, {{0, 1}, {1, 2}, {0, 2}}));
    REQUIRE(s.eigenvalues(0) == 0.0);
    REQUIRE(s.eigenvalues(1) == Approx(3.0).epsilon(1e-13));
    REQUIRE(s.eigenvalues(2) == Approx(3.0).epsilon(1e-13));
}

TEST_CASE("empty graph has no Laplacian", "[graph]") {
    REQUIRE_THROWS_AS(laplacian(Graph(0, {})), GraphError);
}

TEST_CASE("graph construction rejects invalid edges", "[graph]") {
    REQUIRE_THROWS_AS(Graph(3, {{0, 0}}), GraphError);
    REQUIRE_THROWS_AS(Graph(3, {{0, 1}, {1, 0}}), GraphError);
    REQUIRE_THROWS_AS(Graph(3, {{0, 3}}), GraphError);
}

TEST_CASE("Erdos-Renyi sampler", "[graph]") {
    SECTION("full-size connected instance") {
        const auto g = gen_erdos_renyi(250, 1000, 7, true);
        REQUIRE(g.n() == 250);
        REQUIRE(g.edge_count() == 1000);
        REQUIRE(g.connected());
        check_spectral_invariants(g);
    }
    SECTION("forced single edge") {
        const auto g = gen_erdos_renyi(2, 1, 3, true);
        REQUIRE(g.edges() == std::vector<Edge>{{0, 1}});
    }
    SECTION("deterministic in the seed") {
        REQUIRE(gen_erdos_renyi(40, 80, 11, true) == gen_erdos_renyi(40, 80, 11, true));
        REQUIRE_FALSE(gen_erdos_renyi(40, 80, 11, true) == gen_erdos_renyi(40, 80, 12, true));
    }
    SECTION("unsatisfiable requests") {
        REQUIRE_THROWS_AS(gen_erdos_renyi(10, 5, 1, true), GraphError);
        REQUIRE_THROWS_AS(gen_erdos_renyi(4, 7, 1, false), ParameterError);
    }
}

TEST_CASE("Gabriel graph construction", "[graph]") {
    SECTION("collinear points drop the long edge") {
        const auto g = gabriel_graph({Point{0, 0}, Point{1, 0}, Point{2, 0}});
        REQUIRE(g.edges() == std::vector<Edge>{{0, 1}, {1, 2}});
    }
    SECTION("two points always form an edge") {
        for (std::uint64_t seed : {1u, 2u, 3u}) REQUIRE(gen_gabriel(2, seed).edge_count() == 1);
    }
    SECTION("no diametral disk contains a third point") {
        const auto g = gen_gabriel(120, 5);
        REQUIRE(g.n() == 120);
        REQUIRE(g.connected());
        const auto& c = *g.coords();
        for (const auto& [v, w] : g.edges()) {
            const double mx = 0.5 * (c[v][0] + c[w][0]), my = 0.5 * (c[v][1] + c[w][1]);
            const double r2 = 0.25 * (std::pow(c[v][0] - c[w][0], 2) + std::pow(c[v][1] - c[w][1], 2));
            for (int p = 0; p < g.n(); ++p) {
                if (p == v || p == w) continue;
                REQUIRE(std::pow(c[p][0] - mx, 2) + std::pow(c[p][1] - my, 2) > r2);
            }
        }
        for (const auto& p : c) {
            REQUIRE(p[0] >= 0.0);
            REQUIRE(p[0] <= 2.0);
            REQUIRE(p[1] >= 0.0);
            REQUIRE(p[1] <= 1.0);
        }
        check_spectral_invariants(g);
    }
    SECTION("full-size instance keeps its vertex count") {
        const auto g = gen_gabriel(600, 1);
        REQUIRE(g.n() == 600);
        REQUIRE(g.connected());
    }
}

TEST_CASE("edge-list I/O", "[graph]") {
    SECTION("path graph from text") {
        const auto p = temp_file("p3.txt");
        write_text(p, "0 1\n1 2\n");
        const auto g = read_edge_list(p);
        REQUIRE(g.n() == 3);
        REQUIRE(g.edges() == std::vector<Edge>{{0, 1}, {1, 2}});
    }
    SECTION("comments and blank lines are ignored") {
        const auto p = temp_file("commented.txt");
        write_text(p, "# header\n\n0 1 # trailing\n2 1\n");
        REQUIRE(read_edge_list(p).edge_count() == 2);
    }
    SECTION("round trip keeps edges and coordinates") {
        const auto g = gen_gabriel(30, 9);
        const auto p = temp_file("roundtrip.txt");
        write_edge_list(g, p);
        const auto h = read_edge_list(p);
        REQUIRE(h == g);
        REQUIRE(h.coords().has_value());
        for (int v = 0; v < g.n(); ++v) {
            REQUIRE((*h.coords())[v][0] == (*g.coords())[v][0]);
            REQUIRE((*h.coords())[v][1] == (*g.coords())[v][1]);
        }
    }
    SECTION("isolated trailing vertices survive through the count header") {
        const Graph g(5, {{0, 1}});
        const auto p = temp_file("isolated.txt");
        write_edge_list(g, p);
        REQUIRE(read_edge_list(p).n() == 5);
    }
    SECTION("malformed input reports the line") {
        const auto p = temp_file("bad.txt");
        write_text(p, "0 1\n0 0\n");
        try {
            read_edge_list(p);
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            REQUIRE(e.line() == 2);
        }
        write_text(p, "0 1\n1 0\n");
        REQUIRE_THROWS_AS(read_edge_list(p), ParseError);
        write_text(p, "0 x\n");
        REQUIRE_THROWS_AS(read_edge_list(p), ParseError);
        write_text(p, "0 1 2\n");
        REQUIRE_THROWS_AS(read_edge_list(p), ParseError);
        write_text(p, "-1 2\n");
        REQUIRE_THROWS_AS(read_edge_list(p), ParseError);
    }
}
