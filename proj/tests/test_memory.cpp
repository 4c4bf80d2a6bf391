#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <subdiff/memory.hpp>

using namespace subdiff;
using Catch::Approx;

namespace {

// Caputo derivative of sin at t: int_0^t cos(s) (t-s)^{-a} ds / Gamma(1-a).
double caputo_sin(double a, double t) {
    boost::math::quadrature::tanh_sinh<double> ts;
    auto f = [a, t](double s, double dist_to_t) {
        const double tm = (s > 0.5 * t) ? dist_to_t : t - s;
        return std::cos(s) * std::pow(tm, -a);
    };
    return ts.integrate(f, 0.0, t, 1e-15) * gamma_recip(1.0 - a);
}

} // namespace

TEST_CASE("decomposition is exact for linear and quadratic trajectories", "[memory]") {
    for (double a : {0.2, 0.5, 0.8})
        for (int k : {3, 11, 51}) {
            const double t = 2.5;
            const auto lin = caputo_decompose(a, t, k, [](double) { return 3.0; });
            REQUIRE(lin.total() == Approx(3.0 * std::pow(t, 1.0 - a) * gamma_recip(2.0 - a)).epsilon(1e-12));
            const auto quad = caputo_decompose(a, t, k, [](double s) { return 2.0 * s; });
            REQUIRE(quad.total() == Approx(2.0 * std::pow(t, 2.0 - a) * gamma_recip(3.0 - a)).epsilon(1e-12));
            REQUIRE(quad.h == Approx(t / k).epsilon(1e-15));
        }
}

TEST_CASE("decomposition converges at second order for smooth data", "[memory]") {
    for (double a : {0.3, 0.7}) {
        const double t = 1.7, exact = caputo_sin(a, t);
        auto err = [&](int k) {
            return std::abs(caputo_decompose(a, t, k, [](double s) { return std::cos(s); }).total() - exact);
        };
        const double e1 = err(41), e2 = err(81), e3 = err(161);
        REQUIRE(std::log2(e1 / e2) >= 1.8);
        REQUIRE(std::log2(e2 / e3) >= 1.8);
        REQUIRE(e3 < 1e-4);
    }
}

TEST_CASE("L1 scheme order", "[memory]") {
    for (double a : {0.3, 0.6}) {
        const double T = 1.0;
        const double exact = 2.0 * std::pow(T, 2.0 - a) * gamma_recip(3.0 - a);
        std::vector<double> errs;
        for (int N : {64, 128, 256}) {
            std::vector<double> x;
            for (int i = 0; i <= N; ++i) x.push_back(std::pow(i * T / N, 2));
            errs.push_back(std::abs(caputo_l1(a, x, T / N) - exact));
        }
        REQUIRE(std::log2(errs[0] / errs[1]) >= 2.0 - a - 0.1);
        REQUIRE(std::log2(errs[1] / errs[2]) >= 2.0 - a - 0.1);
        // Exact for linear data.
        std::vector<double> lin;
        for (int i = 0; i <= 50; ++i) lin.push_back(0.1 * i);
        REQUIRE(caputo_l1(a, lin, 0.02) == Approx(5.0 * gamma_recip(2.0 - a)).epsilon(1e-12));
    }
    REQUIRE_THROWS_AS(caputo_l1(0.5, {1.0}, 0.1), ParameterError);
}

TEST_CASE("zero-order limit", "[memory]") {
    auto f = [](double s) { return std::exp(-s) + 0.3 * s; };
    const auto lim = limit_alpha0(2.0, 21, f);
    const auto near = caputo_decompose(1e-7, 2.0, 21, f);
    REQUIRE(near.remote == Approx(lim.remote).epsilon(1e-5));
    REQUIRE(near.late_past == Approx(lim.late_past).epsilon(1e-5));
    REQUIRE(near.early_past == Approx(lim.early_past).epsilon(1e-5));
    REQUIRE(near.present == Approx(lim.present).epsilon(1e-5));
    // Trapezoid rule for x(t) - x(0).
    const auto fine = limit_alpha0(2.0, 2001, f);
    REQUIRE(fine.total() == Approx(1.0 - std::exp(-2.0) + 0.6).epsilon(1e-6));
}

TEST_CASE("memory bias", "[memory]") {
    REQUIRE(memory_bias(3.0, 21, [](double s) { return std::exp(-s); }) == MemoryBias::Remote);
    REQUIRE(memory_bias(3.0, 21, [](double s) { return s; }) == MemoryBias::Recent);
    REQUIRE(memory_bias(3.0, 21, [](double) { return 2.0; }) == MemoryBias::Neutral);
    REQUIRE(classify_bias(1.0, 1.0 + 1e-14) == MemoryBias::Neutral);
    REQUIRE(to_string(MemoryBias::Remote) == "remote");
    REQUIRE(to_string(MemoryBias::Recent) == "recent");
    REQUIRE(to_string(MemoryBias::Neutral) == "neutral");
    const auto m = caputo_decompose(0.5, 3.0, 21, [](double s) { return std::exp(-s); });
    REQUIRE(memory_bias(m) == MemoryBias::Remote);
}

TEST_CASE("past and present split", "[memory]") {
    auto f = [](double s) { return std::sin(s) + 2.0; };
    const auto [past, present] = past_present_split(2.0, 15, f);
    REQUIRE(past + present == Approx(limit_alpha0(2.0, 15, f).total()).epsilon(1e-14));
    REQUIRE(past > 0.0);
}

TEST_CASE("bias changes between windows and between vertices", "[memory]") {
    auto f = [](double s) { return std::sin(s); };
    const auto [first, second] = two_window_bias(0.1, 1.4, 1.8, 3.0, 21, f);
    REQUIRE(first == MemoryBias::Recent);
    REQUIRE(second == MemoryBias::Remote);
    const auto [vi, vj] = two_vertex_bias(0.5, 1.0, 21, f, [](double s) { return -s * s; });
    REQUIRE(vi == MemoryBias::Recent);
    REQUIRE(vj == MemoryBias::Remote);
    REQUIRE_THROWS_AS(two_window_bias(1.0, 0.5, 2.0, 3.0, 21, f), ParameterError);
}

TEST_CASE("grid validation", "[memory]") {
    auto f = [](double) { return 1.0; };
    REQUIRE_THROWS_AS(caputo_decompose(0.5, 1.0, 4, f), ParameterError);
    REQUIRE_THROWS_AS(caputo_decompose(0.5, 1.0, 1, f), ParameterError);
    REQUIRE_THROWS_AS(caputo_decompose(0.5, 0.0, 5, f), ParameterError);
    REQUIRE_THROWS_AS(caputo_decompose(1.0, 1.0, 5, f), ParameterError);
    REQUIRE_THROWS_AS(limit_alpha0(1.0, 6, f), ParameterError);
}

TEST_CASE("vertex trajectories", "[memory]") {
    const auto g = gen_gabriel(40, 3);
    const auto spec = laplacian(g);
    Eigen::VectorXd u0 = Eigen::VectorXd::Zero(g.n());
    u0(5) = 1.0;
    const auto dv = vertex_derivative(0.6, spec, u0, 5);
    REQUIRE(dv(0.3) == fde_time_derivative(0.6, 0.3, spec, u0)(5));
    const std::vector<double> ts{1e-3, 0.1, 5.0};
    const auto prof = convexity_profile(0.6, spec, g, 5, ts);
    REQUIRE(prof.size() == ts.size() * (1 + g.degree(5)));
    for (const auto& r : prof) {
        if (r.is_source) {
            REQUIRE(r.vertex == 5);
            REQUIRE(r.d1 < 0.0);
            REQUIRE(r.d2 > 0.0);
        }
        const double h = 1e-3 * r.t;
        const auto dvr = vertex_derivative(0.6, spec, u0, r.vertex);
        const double fd = (dvr(r.t + h) - dvr(r.t - h)) / (2.0 * h);
        REQUIRE(r.d2 == Approx(fd).epsilon(1e-4));
    }
    // Neighbors gain mass at early times.
    for (const auto& r : prof)
        if (!r.is_source && r.t == 1e-3) REQUIRE(r.d1 > 0.0);
    REQUIRE_THROWS_AS(convexity_profile(0.6, spec, g, 5, {1e-9}), ParameterError);
    REQUIRE_THROWS_AS(convexity_profile(0.6, spec, g, 40, ts), ParameterError);
}
