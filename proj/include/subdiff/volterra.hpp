#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/exp_sinh.hpp>

#include "errors.hpp"
#include "graph.hpp"
#include "soe.hpp"
#include "special.hpp"

namespace subdiff {

// Operator-valued Laplace symbol at a real frequency s > 0.
struct LaplaceSymbol {
    double s = 1.0;
    Eigen::MatrixXd matrix;
};

// s^{alpha-1} (s^alpha I + L)^{-1}
inline LaplaceSymbol g_hat_fractional(double alpha, double s, const SpectralLaplacian& spec) {
    detail::require(alpha > 0.0 && alpha <= 1.0, "order must lie in (0,1]");
    detail::require(s > 0.0, "frequency must be > 0");
    const double sa = std::pow(s, alpha), pre = std::pow(s, alpha - 1.0);
    return {s, spec.apply([&](double lam) { return pre / (sa + lam); })};
}

inline double g_hat_soe_mode(const std::vector<double>& a, const std::vector<double>& b, double s, double lam) {
    detail::CompensatedSum acc;
    for (std::size_t j = 0; j < a.size(); ++j) acc.add(a[j] / (s + b[j] * lam));
    return acc.sum;
}

// sum_j a_j (s I + b_j L)^{-1}
inline LaplaceSymbol g_hat_soe(const std::vector<double>& a, const std::vector<double>& b, double s,
                               const SpectralLaplacian& spec) {
    detail::require(s > 0.0, "frequency must be > 0");
    detail::require(!a.empty() && a.size() == b.size(), "coefficient lists must be non-empty and aligned");
    return {s, spec.apply([&](double lam) { return g_hat_soe_mode(a, b, s, lam); })};
}

namespace detail {

// Orthonormal basis of Ran(L): eigenvectors with eigenvalue above 1e-10 lambda_max.
inline Eigen::MatrixXd range_basis(const SpectralLaplacian& spec, Eigen::VectorXd* lambdas = nullptr) {
    const double thr = 1e-10 * std::max(1.0, spec.lambda_max);
    std::vector<Eigen::Index> keep;
    for (Eigen::Index k = 0; k < spec.eigenvalues.size(); ++k)
        if (spec.eigenvalues(k) > thr) keep.push_back(k);
    Eigen::MatrixXd Q(spec.n(), static_cast<Eigen::Index>(keep.size()));
    if (lambdas) lambdas->resize(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) {
        Q.col(static_cast<Eigen::Index>(c)) = spec.eigenvectors.col(keep[c]);
        if (lambdas) (*lambdas)(static_cast<Eigen::Index>(c)) = spec.eigenvalues(keep[c]);
    }
    return Q;
}

inline double spectral_norm(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    return svd.singularValues()(0);
}

} // namespace detail

// Pseudo-inverse of L by spectral thresholding at 1e-10 lambda_max.
inline Eigen::MatrixXd laplacian_pinv(const SpectralLaplacian& spec) {
    const double thr = 1e-10 * std::max(1.0, spec.lambda_max);
    return spec.apply([thr](double lam) { return lam > thr ? 1.0 / lam : 0.0; });
}

struct KernelSymbol {
    LaplaceSymbol symbol;
    double condition = 1.0;  // 2-norm condition number of G restricted to Ran(L)
};

// Memory symbol (G^{-1} - s I) L^+ with G inverted on the mean-zero subspace
// by a pivoted LU of its compression to Ran(L).
inline KernelSymbol k_hat(const LaplaceSymbol& G, const SpectralLaplacian& spec) {
    Eigen::VectorXd lam;
    const Eigen::MatrixXd Q = detail::range_basis(spec, &lam);
    const Eigen::Index r = Q.cols();
    KernelSymbol out;
    out.symbol.s = G.s;
    if (r == 0) {
        out.symbol.matrix = Eigen::MatrixXd::Zero(spec.n(), spec.n());
        return out;
    }
    const Eigen::MatrixXd Gr = Q.transpose() * G.matrix * Q;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Gr);
    const auto& sv = svd.singularValues();
    out.condition = sv(r - 1) > 0.0 ? sv(0) / sv(r - 1) : std::numeric_limits<double>::infinity();
    if (!(out.condition < 1e12)) throw NumericalError("memory symbol is ill-conditioned on the mean-zero subspace");
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(Gr);
    Eigen::MatrixXd Kr = lu.inverse() - G.s * Eigen::MatrixXd::Identity(r, r);
    Kr = Kr * lam.cwiseInverse().asDiagonal();
    out.symbol.matrix = Q * Kr * Q.transpose();
    return out;
}

inline KernelSymbol k_hat_soe(const std::vector<double>& a, const std::vector<double>& b, double s,
                              const SpectralLaplacian& spec) {
    return k_hat(g_hat_soe(a, b, s, spec), spec);
}

// ||(sI + K L)^{-1} - G||_2 on the mean-zero subspace.
inline double resolvent_identity_residual(const KernelSymbol& K, const LaplaceSymbol& G, const SpectralLaplacian& spec) {
    const Eigen::MatrixXd Q = detail::range_basis(spec);
    const Eigen::Index r = Q.cols();
    if (r == 0) return 0.0;
    const Eigen::MatrixXd M =
        Q.transpose() * (G.s * Eigen::MatrixXd::Identity(spec.n(), spec.n()) + K.symbol.matrix * spec.L) * Q;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
    return detail::spectral_norm(lu.inverse() - Q.transpose() * G.matrix * Q);
}

// ||G^(J)(s) - G_S(s)||_2; both symbols share the eigenbasis of L.
inline double resolvent_gap(double alpha, const std::vector<double>& a, const std::vector<double>& b, double s,
                            const SpectralLaplacian& spec) {
    const double sa = std::pow(s, alpha), pre = std::pow(s, alpha - 1.0);
    double worst = 0.0;
    for (Eigen::Index k = 0; k < spec.eigenvalues.size(); ++k) {
        const double lam = spec.eigenvalues(k);
        worst = std::max(worst, std::abs(g_hat_soe_mode(a, b, s, lam) - pre / (sa + lam)));
    }
    return worst;
}

// |(s + s^{1-alpha} lambda) u - 1| with u = s^{alpha-1}/(s^alpha + lambda).
inline double caputo_volterra_check(double alpha, double lambda, double s) {
    detail::require(alpha > 0.0 && alpha <= 1.0, "order must lie in (0,1]");
    detail::require(s > 0.0 && lambda >= 0.0, "need s > 0 and lambda >= 0");
    const double u = std::pow(s, alpha - 1.0) / (std::pow(s, alpha) + lambda);
    return std::abs((s + std::pow(s, 1.0 - alpha) * lambda) * u - 1.0);
}

// int_0^inf e^{-st} E_alpha(-t^alpha lambda) dt by double-exponential quadrature.
inline double laplace_transform_ml(double alpha, double lambda, double s) {
    boost::math::quadrature::exp_sinh<double> integrator;
    auto f = [&](double t) { return std::exp(-s * t) * mittag_leffler(alpha, -std::pow(t, alpha) * lambda); };
    return integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-12);
}

// Applies prod_m (d/dt + beta_m lambda) to y(t) = sum_j gamma_j e^{-beta_j lambda t}.
// The operator polynomial is expanded into coefficients c_k of d^k/dt^k and
// applied to the exponentials exactly. Returns |result| divided by
// sum|gamma_j| (max beta lambda)^J e^{-min beta lambda t}.
inline double multiplicative_residual(const std::vector<double>& betas, const std::vector<double>& gammas,
                                      double lambda, double t) {
    detail::require(!betas.empty() && betas.size() == gammas.size(), "betas and gammas must be aligned");
    for (std::size_t i = 0; i < betas.size(); ++i) {
        detail::require(betas[i] > 0.0, "betas must be positive");
        for (std::size_t j = 0; j < i; ++j)
            detail::require(betas[i] != betas[j], "betas must be pairwise distinct");
    }
    const std::size_t J = betas.size();
    // coeff[k] multiplies D^k; start from the constant polynomial 1.
    std::vector<double> coeff{1.0};
    for (double beta : betas) {
        std::vector<double> next(coeff.size() + 1, 0.0);
        for (std::size_t k = 0; k < coeff.size(); ++k) {
            next[k + 1] += coeff[k];
            next[k] += beta * lambda * coeff[k];
        }
        coeff = std::move(next);
    }
    detail::CompensatedSum result;
    double gsum = 0.0, rate_max = 0.0, rate_min = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < J; ++j) {
        const double r = betas[j] * lambda;
        // p(-r) = sum_k c_k (-r)^k
        detail::CompensatedSum poly;
        double pw = 1.0;
        for (double c : coeff) {
            poly.add(c * pw);
            pw *= -r;
        }
        result.add(gammas[j] * poly.sum * std::exp(-r * t));
        gsum += std::abs(gammas[j]);
        rate_max = std::max(rate_max, r);
        rate_min = std::min(rate_min, r);
    }
    const double scale = gsum * std::pow(rate_max, static_cast<double>(J)) * std::exp(-rate_min * t);
    return scale > 0.0 ? std::abs(result.sum) / scale : std::abs(result.sum);
}

// Multiplex operator on J layers: diagonal blocks beta_j L, every
// off-diagonal block omega I.
struct SupraLaplacian {
    int layers = 0;
    int n = 0;
    std::vector<double> betas;
    double omega = 0.0;
    Eigen::MatrixXd matrix;
};

inline SupraLaplacian build_supra_laplacian(const SpectralLaplacian& spec, const std::vector<double>& betas,
                                            double omega) {
    detail::require(!betas.empty(), "need at least one layer");
    detail::require(omega >= 0.0, "coupling must be >= 0");
    SupraLaplacian sl;
    sl.layers = static_cast<int>(betas.size());
    sl.n = spec.n();
    sl.betas = betas;
    sl.omega = omega;
    const int n = sl.n, J = sl.layers;
    sl.matrix = Eigen::MatrixXd::Zero(J * n, J * n);
    for (int p = 0; p < J; ++p)
        for (int q = 0; q < J; ++q) {
            if (p == q) sl.matrix.block(p * n, q * n, n, n) = betas[p] * spec.L;
            else sl.matrix.block(p * n, q * n, n, n) = omega * Eigen::MatrixXd::Identity(n, n);
        }
    return sl;
}

struct MultiplexState {
    std::vector<Eigen::VectorXd> layers;
    Eigen::VectorXd aggregate;
};

// e^{-t S} (gamma (x) phi) through the eigendecomposition of S; the
// aggregate sums the layer states vertexwise.
inline MultiplexState multiplex_diffuse(const SupraLaplacian& sl, const std::vector<double>& gammas,
                                        const Eigen::VectorXd& phi, double t) {
    detail::require(static_cast<int>(gammas.size()) == sl.layers, "one gamma per layer required");
    detail::require(phi.size() == sl.n, "phi length must match the graph");
    const int n = sl.n, J = sl.layers;
    Eigen::VectorXd u0(J * n);
    for (int p = 0; p < J; ++p) u0.segment(p * n, n) = gammas[p] * phi;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sl.matrix);
    if (es.info() != Eigen::Success) throw NumericalError("supra-Laplacian eigensolver failed");
    Eigen::VectorXd c = es.eigenvectors().transpose() * u0;
    for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= std::exp(-t * es.eigenvalues()(k));
    const Eigen::VectorXd u = es.eigenvectors() * c;
    MultiplexState st;
    st.aggregate = Eigen::VectorXd::Zero(n);
    for (int p = 0; p < J; ++p) {
        st.layers.push_back(u.segment(p * n, n));
        st.aggregate += st.layers.back();
    }
    return st;
}

// Recovers psi_j from y^(m)(0) = sum_j (-beta_j lambda)^m psi_j, m = 0..J-1,
// by a partially pivoted Vandermonde solve.
inline std::vector<double> recover_mode_coefficients(const std::vector<double>& betas, double lambda,
                                                     const std::vector<double>& derivatives) {
    const std::size_t J = betas.size();
    detail::require(J >= 1 && J <= 8, "Vandermonde recovery supports 1 <= J <= 8");
    detail::require(derivatives.size() == J, "need J derivative values");
    detail::require(lambda > 0.0, "mode eigenvalue must be > 0");
    Eigen::MatrixXd V(J, J);
    for (std::size_t m = 0; m < J; ++m)
        for (std::size_t j = 0; j < J; ++j) V(m, j) = std::pow(-betas[j] * lambda, static_cast<double>(m));
    Eigen::VectorXd rhs(J);
    for (std::size_t m = 0; m < J; ++m) rhs(m) = derivatives[m];
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(V);
    if (std::abs(lu.determinant()) == 0.0) throw NumericalError("Vandermonde system is singular");
    const Eigen::VectorXd psi = lu.solve(rhs);
    return std::vector<double>(psi.data(), psi.data() + psi.size());
}

struct StabilityCheck {
    double lhs = 0.0;    // ||B^{-1} - A^{-1}||
    double bound = 0.0;  // M^2 / (1 - delta M) ||B - A||
    double M = 0.0;      // ||A^{-1}||
    double delta = 0.0;  // ||B - A||
    bool applicable = false;
};

// Perturbation bound for inverses, valid when delta M < 1.
inline StabilityCheck inverse_stability_check(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    StabilityCheck c;
    const Eigen::MatrixXd Ai = A.inverse(), Bi = B.inverse();
    c.M = detail::spectral_norm(Ai);
    c.delta = detail::spectral_norm(B - A);
    c.lhs = detail::spectral_norm(Bi - Ai);
    c.applicable = c.delta * c.M < 1.0;
    c.bound = c.applicable ? c.M * c.M / (1.0 - c.delta * c.M) * c.delta : std::numeric_limits<double>::infinity();
    return c;
}

} // namespace subdiff
