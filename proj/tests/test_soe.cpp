#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <limits>
#include <numbers>
#include <random>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <subdiff/soe.hpp>

using namespace subdiff;
using Catch::Approx;

namespace {

double left_mass(double a, double theta_min, double x) {
    auto f = [&](double th) { return mwright(a, th) * std::exp(-x * th); };
    double err;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, theta_min, 0, 1e-13, &err);
}

double right_mass(double a, double theta_max, double x) {
    auto f = [&](double th) { return mwright(a, th) * std::exp(-x * th); };
    boost::math::quadrature::exp_sinh<double> es;
    return es.integrate(f, theta_max, std::numeric_limits<double>::infinity(), 1e-13);
}

const SpectralLaplacian& er_spec() {
    static const SpectralLaplacian s = laplacian(gen_erdos_renyi(60, 180, 7, true));
    return s;
}

} // namespace

TEST_CASE("window endpoints", "[soe]") {
    const auto h = select_window(0.5, 1e-8);
    REQUIRE(h.theta_min == Approx(0.5e-8 * std::sqrt(std::numbers::pi)).epsilon(1e-14));
    REQUIRE(h.theta_max == Approx(std::sqrt(4.0 * std::log(2e8))).epsilon(1e-14));
    const auto w = select_window(0.2, 1e-6);
    REQUIRE(w.theta_max == Approx(14.016).margin(5e-4));
    REQUIRE(w.theta_min == Approx(5.82e-7).margin(5e-10));
    REQUIRE(w.y_min() == Approx(std::log(w.theta_min)).epsilon(1e-15));
    // Tighter tolerance widens the window on both sides.
    for (double a : {0.2, 0.5, 0.8}) {
        const auto loose = select_window(a, 1e-6), tight = select_window(a, 1e-12);
        REQUIRE(tight.theta_min < loose.theta_min);
        REQUIRE(tight.theta_max > loose.theta_max);
    }
    REQUIRE_THROWS_AS(select_window(1.0, 1e-6), ParameterError);
    REQUIRE_THROWS_AS(select_window(0.5, 0.0), ParameterError);
    REQUIRE_THROWS_AS(select_window(0.5, 1.0), ParameterError);
}

TEST_CASE("mean-zero window", "[soe]") {
    const auto w = select_window_mean_zero(0.6, 1e-10, 0.8, 2.0);
    REQUIRE(w.mode == WindowMode::MeanZero);
    REQUIRE(w.theta_max == Approx(std::log(2e10) / 1.6).epsilon(1e-14));
    REQUIRE(w.theta_min == select_window(0.6, 1e-10).theta_min);
    REQUIRE_THROWS_AS(select_window_mean_zero(0.6, 1e-10, 0.0, 1.0), ParameterError);
    REQUIRE_THROWS_AS(select_window_mean_zero(0.6, 1e-10, 1.0, 0.0), ParameterError);
}

TEST_CASE("tail bounds dominate the true tail mass", "[soe]") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> logt(-2.0, 3.0), loglam(-3.0, 1.5);
    for (double a : {0.2, 0.5, 0.8})
        for (double eps : {1e-6, 1e-12}) {
            const auto w = select_window(a, eps);
            const auto b0 = tail_bounds(w, 1.0, 0.0);
            REQUIRE(b0.left >= left_mass(a, w.theta_min, 0.0) * (1.0 - 1e-12));
            REQUIRE(b0.right() >= right_mass(a, w.theta_max, 0.0));
            REQUIRE(b0.left <= eps);
            REQUIRE(b0.right() <= eps);
            for (int i = 0; i < 20; ++i) {
                const double t = std::pow(10.0, logt(rng)), lam = std::pow(10.0, loglam(rng));
                const double x = std::pow(t, a) * lam;
                const auto tb = tail_bounds(w, t, lam);
                REQUIRE(tb.left >= left_mass(a, w.theta_min, x) * (1.0 - 1e-12));
                REQUIRE(tb.right() >= right_mass(a, w.theta_max, x));
                REQUIRE(tb.right_gap == Approx(std::exp(-x * w.theta_max)).epsilon(1e-14));
            }
        }
}

TEST_CASE("SOE weights", "[soe]") {
    for (double a : {0.25, 0.5, 0.85}) {
        const auto w = select_window(a, 1e-12);
        for (int J : {2, 10, 61, 111}) {
            const auto s = build_soe(a, J, w);
            REQUIRE(static_cast<int>(s.b.size()) == J);
            double total = 0.0;
            for (double x : s.a) total += x;
            REQUIRE(total == Approx(1.0).margin(1e-14));
            REQUIRE(s.b.front() == Approx(w.theta_min).epsilon(1e-13));
            REQUIRE(s.b.back() == Approx(w.theta_max).epsilon(1e-14));
            for (int j = 1; j < J; ++j) REQUIRE(s.b[j] > s.b[j - 1]);
            for (double x : s.a) REQUIRE(x >= 0.0);
        }
        // The trapezoid mass converges to the full unit mass minus the tails.
        REQUIRE(build_soe(a, 400, w).mass_win == Approx(1.0).margin(1e-9));
    }
    REQUIRE_THROWS_AS(build_soe(0.5, 0, select_window(0.5, 1e-6)), ParameterError);
    REQUIRE_THROWS_AS(build_soe(0.4, 10, select_window(0.5, 1e-6)), ParameterError);
}

TEST_CASE("coefficient table at alpha 0.85, J 111", "[soe]") {
    const auto s = build_soe(0.85, 111, select_window(0.85, 1e-12));
    std::vector<int> idx(111);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int i, int j) { return s.a[i] > s.a[j]; });
    const double top_a[] = {0.286, 0.269, 0.167, 0.094, 0.056};
    const double top_b[] = {1.193, 1.531, 0.930, 0.725, 0.565};
    for (int k = 0; k < 5; ++k) {
        REQUIRE(s.a[idx[k]] == Approx(top_a[k]).margin(5e-4));
        REQUIRE(s.b[idx[k]] == Approx(top_b[k]).margin(5e-4));
    }
}

TEST_CASE("single-node scheme", "[soe]") {
    for (double a : {0.3, 0.7}) {
        const auto s = build_soe(a, 1, select_window(a, 1e-12));
        REQUIRE(s.b.front() == Approx(gamma_recip(1.0 + a)).epsilon(1e-15));
        REQUIRE(s.a.front() == 1.0);
        // First-order agreement in x = t^alpha lambda.
        for (double x : {1e-3, 1e-4}) {
            const double err = std::abs(soe_scalar(s, 1.0, x) - mittag_leffler(a, -x));
            REQUIRE(err <= 2.0 * x * x);
        }
    }
}

TEST_CASE("scalar SOE error falls with J", "[soe]") {
    const auto& spec = er_spec();
    for (double a : {0.25, 0.5, 0.8}) {
        const auto w = select_window(a, 1e-12);
        const double e20 = scalar_error(build_soe(a, 20, w), 11.0, spec.lambda_max);
        const double e60 = scalar_error(build_soe(a, 60, w), 11.0, spec.lambda_max);
        const double e120 = scalar_error(build_soe(a, 120, w), 11.0, spec.lambda_max);
        REQUIRE(e60 < e20);
        REQUIRE(e120 <= e60);
        REQUIRE(e120 < 1e-4);
        REQUIRE(scalar_error(build_soe(a, 60, w), 11.0, spec.lambda_max, 2000, &spec.eigenvalues) >= e60);
        REQUIRE(spectral_error(build_soe(a, 60, w), 11.0, spec) <=
                scalar_error(build_soe(a, 60, w), 11.0, spec.lambda_max, 2000, &spec.eigenvalues));
    }
    REQUIRE_THROWS_AS(scalar_error(build_soe(0.5, 5, select_window(0.5, 1e-6)), 1.0, 1.0, 0), ParameterError);
}

TEST_CASE("SOE operator", "[soe]") {
    const auto& spec = er_spec();
    const auto s = build_soe(0.5, 61, select_window(0.5, 1e-12));
    for (double t : {0.0, 0.5, 50.0}) {
        const auto F = soe_operator(s, t, spec).matrix;
        const Eigen::Index n = F.rows();
        REQUIRE((F * Eigen::VectorXd::Ones(n) - Eigen::VectorXd::Ones(n)).cwiseAbs().maxCoeff() <= 1e-12);
        REQUIRE((F - F.transpose()).cwiseAbs().maxCoeff() <= 1e-14);
    }
    // Each heat factor agrees with the semigroup.
    const auto one = build_soe(0.5, 1, select_window(0.5, 1e-12));
    const double b = one.b.front();
    REQUIRE((soe_operator(one, 4.0, spec).matrix - heat_operator(b * 2.0, spec).matrix).cwiseAbs().maxCoeff() <=
            1e-12);
}

TEST_CASE("operator error equals the spectral error", "[soe]") {
    const auto& spec = er_spec();
    for (double a : {0.3, 0.8})
        for (int J : {8, 30}) {
            const auto s = build_soe(a, J, select_window(a, 1e-12));
            for (double t : {1.0, 30.0}) {
                const auto est = operator_error(s, t, spec);
                REQUIRE(est.converged);
                REQUIRE(est.value == Approx(spectral_error(s, t, spec)).epsilon(1e-6));
            }
        }
}

TEST_CASE("probe errors", "[soe]") {
    const auto& spec = er_spec();
    const auto probes = make_probes(spec.n());
    REQUIRE(probes.size() == 8);
    for (const auto& p : probes) REQUIRE(p.norm() == Approx(1.0).epsilon(1e-14));
    REQUIRE(make_probes(spec.n())[3] == probes[3]);
    const auto s = build_soe(0.5, 111, select_window(0.5, 1e-12));
    const auto e = max_probe_errors(s, 11.0, spec);
    REQUIRE(e.masserr <= 1e-12);
    const double op = operator_error(s, 11.0, spec).value;
    for (const auto& p : probes) {
        const auto pe = probe_errors(s, 11.0, spec, p);
        REQUIRE(pe.relerr * solve_fde(0.5, 11.0, spec, p).norm() <= op * (1.0 + 1e-9));
        REQUIRE(pe.relerr <= e.relerr);
    }
    REQUIRE_THROWS_AS(probe_errors(s, 1.0, spec, Eigen::VectorXd::Ones(3)), ParameterError);
}

TEST_CASE("effective times", "[soe]") {
    const auto s = build_soe(0.85, 111, select_window(0.85, 1e-12));
    const auto te = effective_times(s, 10.0);
    REQUIRE(te.back() == Approx(10.0).epsilon(1e-15));
    for (std::size_t j = 1; j < te.size(); ++j) REQUIRE(te[j] > te[j - 1]);
    const auto top = effective_times(s, 10.0, 10);
    // The heaviest ten nodes reach up to b = 1.531.
    REQUIRE(s.b.back() / std::pow(top.back() / 10.0, 0.85) == Approx(1.531).margin(5e-4));
}
