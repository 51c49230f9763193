#pragma once

// Reference computations for the test suites. Nothing here calls the
// library's gradients, criteria or solvers: information matrices come from
// finite differences of the mean, criterion values from a plain
// eigendecomposition, and optima from derivative-free searches.

#include "satdesign/satdesign.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace satdesign::oracle {

inline ModelOptions options_of(const Model& m) {
    ModelOptions o;
    o.efficiency = m.efficiency_function();
    return o;
}

/// ∂η/∂θ by central differences through the registry.
inline Vector fd_mean_gradient(const Model& m, double x) {
    const Vector theta = m.theta();
    Vector g(theta.size());
    for (Eigen::Index j = 0; j < theta.size(); ++j) {
        const double h = 1e-6 * std::max(1.0, std::abs(theta(j)));
        Vector up = theta;
        Vector down = theta;
        up(j) += h;
        down(j) -= h;
        const auto mu = builtin_models().make(m.name(), up, options_of(m));
        const auto md = builtin_models().make(m.name(), down, options_of(m));
        g(j) = (mu->mean(x) - md->mean(x)) / (2.0 * h);
    }
    return g;
}

inline double std_normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }
inline double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// Per-observation weight written out per model family.
inline double unit_weight(const Model& m, double x) {
    const double eta = m.mean(x);
    switch (m.kind()) {
    case ModelKind::poisson: return std::exp(eta);
    case ModelKind::logistic: {
        const double p = 1.0 / (1.0 + std::exp(-eta));
        return p * (1.0 - p);
    }
    case ModelKind::probit: {
        const double F = std_normal_cdf(eta);
        const double f = std_normal_pdf(eta);
        return f * f / (F * (1.0 - F));
    }
    case ModelKind::polynomial: {
        const auto e = *m.efficiency_function();
        using K = EfficiencyFunction::Kind;
        switch (e.kind) {
        case K::constant: return 1.0;
        case K::one_minus_x: return 1.0 - x;
        case K::one_plus_x: return 1.0 + x;
        case K::exp_neg_x: return std::exp(-x);
        case K::jacobi: return std::pow(1.0 - x, e.u + 1.0) * std::pow(1.0 + x, e.v + 1.0);
        case K::laguerre: return std::pow(x, e.u + 1.0) * std::exp(-x);
        case K::gauss: return std::exp(-x * x);
        case K::cauchy: return std::pow(1.0 + x * x, -e.t);
        }
        return 1.0;
    }
    default: return 1.0;
    }
}

/// Polynomial regression functions (1, x, ..., x^{d-1}); the polynomial
/// mean is linear in θ, so differences through θ would be exact anyway.
inline Vector regression_vector(const Model& m, double x) {
    if (m.kind() != ModelKind::polynomial) return fd_mean_gradient(m, x);
    Vector f(static_cast<Eigen::Index>(m.dim()));
    double p = 1.0;
    for (Eigen::Index j = 0; j < f.size(); ++j, p *= x) f(j) = p;
    return f;
}

inline Matrix unit_info(const Model& m, double x) {
    const Vector f = regression_vector(m, x);
    return unit_weight(m, x) * f * f.transpose();
}

inline Matrix info(const Model& m, const std::vector<double>& points, const std::vector<double>& weights) {
    const auto d = static_cast<Eigen::Index>(m.dim());
    Matrix M = Matrix::Zero(d, d);
    for (std::size_t i = 0; i < points.size(); ++i) M += weights[i] * unit_info(m, points[i]);
    return M;
}

inline Matrix info(const Model& m, const Design& d) {
    return info(m, {d.points().begin(), d.points().end()}, {d.weights().begin(), d.weights().end()});
}

/// Φ_p of M for the identity transform: det^{1/d} for p = 0, otherwise
/// (tr(M^p)/d)^{1/p}.
inline double phi_p(double p, const Matrix& M) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(M);
    const Vector lam = es.eigenvalues();
    if (lam.minCoeff() <= 0.0) return 0.0;
    const double d = static_cast<double>(lam.size());
    if (p == 0.0) return std::exp(lam.array().log().sum() / d);
    return std::pow(lam.array().pow(p).sum() / d, 1.0 / p);
}

/// c-criterion value 1 / (aᵀ M⁻¹ a).
inline double c_value(const Vector& a, const Matrix& M) {
    Eigen::FullPivLU<Matrix> lu(M);
    if (!lu.isInvertible()) return 0.0;
    return 1.0 / a.dot(lu.solve(a));
}

/// Central-difference derivative of a scalar function of a symmetric matrix,
/// arranged so that f(M + H) ≈ f(M) + ⟨G, H⟩.
inline Matrix fd_matrix_gradient(const std::function<double(const Matrix&)>& f, const Matrix& M, double rel_step = 1e-6) {
    const Eigen::Index d = M.rows();
    Matrix G(d, d);
    const double h = rel_step * std::max(1.0, M.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = i; j < d; ++j) {
            Matrix E = Matrix::Zero(d, d);
            E(i, j) = 1.0;
            E(j, i) = 1.0;
            const double diff = (f(M + h * E) - f(M - h * E)) / (2.0 * h);
            if (i == j) {
                G(i, i) = diff;
            } else {
                G(i, j) = diff / 2.0;
                G(j, i) = diff / 2.0;
            }
        }
    }
    return G;
}

/// Five-point central difference of f at v. Each step is relative to |v_j|
/// and capped by `max_step` so that the stencil stays feasible.
inline Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& v, double max_step,
                          double rel_step = 1e-3) {
    Vector g(v.size());
    for (Eigen::Index j = 0; j < v.size(); ++j) {
        const double h = std::min(rel_step * std::max(1.0, std::abs(v(j))), max_step);
        auto at = [&](double t) {
            Vector w = v;
            w(j) += t;
            return f(w);
        };
        g(j) = (8.0 * (at(h) - at(-h)) - (at(2.0 * h) - at(-2.0 * h))) / (12.0 * h);
    }
    return g;
}

/// Reduced unknowns kept away from every constraint: point i is drawn from
/// the middle of its own slice of [lo, hi], and the weights are half
/// Dirichlet, half uniform.
inline ZVector spread_z(std::mt19937_64& rng, std::size_t n_points, std::size_t m, double lo, double hi) {
    std::uniform_real_distribution<double> u(0.2, 0.8);
    ZVector z;
    const double slice = (hi - lo) / static_cast<double>(n_points + 1);
    for (std::size_t i = 0; i < n_points; ++i) z.free_points.push_back(lo + slice * (static_cast<double>(i) + 0.5 + u(rng)));
    std::gamma_distribution<double> g(1.0, 1.0);
    std::vector<double> w(m);
    double sum = 0.0;
    for (double& x : w) sum += (x = g(rng));
    for (std::size_t i = 1; i < m; ++i) z.free_weights.push_back(0.5 * w[i] / sum + 0.5 / static_cast<double>(m));
    return z;
}

/// Golden-section maximizer of a unimodal function on [lo, hi].
inline double golden_max(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-12) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - r * (b - a);
    double d = a + r * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > tol * std::max(1.0, std::abs(a) + std::abs(b))) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

/// Best two-point design {(anchor, 1-w), (x, w)} with x searched on [lo, hi]
/// and w on (0, 1), each by golden section.
struct TwoPoint {
    double x = 0.0;
    double w = 0.0;
};

inline TwoPoint best_two_point(const Model& m, double anchor, double lo, double hi,
                               const std::function<double(const Matrix&)>& criterion) {
    auto best_w = [&](double x) {
        return golden_max([&](double w) { return criterion(info(m, {anchor, x}, {1.0 - w, w})); }, 1e-9, 1.0 - 1e-9, 1e-13);
    };
    const double x = golden_max([&](double x) { return criterion(info(m, {anchor, x}, {1.0 - best_w(x), best_w(x)})); }, lo, hi, 1e-12);
    return {x, best_w(x)};
}

// Explicit optimal designs, written out from their formulas.

/// Middle point x*_E of the Emax D-, e3- and e2-optimal designs.
inline double emax_x(double L, double U, double t3) { return (L * (U + t3) + U * (L + t3)) / (L + U + 2.0 * t3); }

/// Middle point x*_l of the log-linear designs.
inline double loglin_x(double L, double U, double t3) {
    return (L + t3) * (U + t3) / (U - L) * std::log((U + t3) / (L + t3)) - t3;
}

/// Weight at L of the log-linear e3-optimal design.
inline double loglin_e3_weight(double L, double U, double t3) {
    const double x = loglin_x(L, U, t3);
    return (std::log(x + t3) - std::log(U + t3)) / (2.0 * (std::log(L + t3) - std::log(U + t3)));
}

/// Weights at L and U of the Emax e2-optimal design.
inline std::pair<double, double> emax_e2_weights(double L, double U, double t3) {
    const double q = (U - L) * t3 / (8.0 * (t3 * t3 - L * U));
    return {0.25 - q, 0.25 + q};
}

/// Weights at L and U of the log-linear e2-optimal design. The shift in the
/// formula is θ3, the parameter inside the logarithm.
inline std::pair<double, double> loglin_e2_weights(double L, double U, double t3) {
    const double x = loglin_x(L, U, t3);
    const double den = 2.0 * (U - L) * (x + t3);
    return {(U - x) * (L + t3) / den, (x - L) * (U + t3) / den};
}

/// Sorted uniform draws of `count` distinct points in [lo, hi].
/// Constant u with (u - 1) e^u = 1, found by bisection; the Poisson
/// slope-optimal design puts weight e^u / (1 + e^u) at offset 2u / |θ2|.
inline double poisson_e2_u() {
    double lo = 1.0;
    double hi = 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        ((mid - 1.0) * std::exp(mid) < 1.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Directional derivative of Φ_p (identity transform, p ≤ 0) at M toward I:
/// Φ_p(M)^{1-p} tr(M^{p-1} I) / k - Φ_p(M).
inline double phi_p_sensitivity(double p, const Matrix& M, const Matrix& I) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(M);
    const Vector lam = es.eigenvalues();
    const Matrix V = es.eigenvectors();
    const Vector mp = lam.array().pow(p - 1.0);
    const double tr = (V.transpose() * I * V).diagonal().dot(mp);
    const double phi = phi_p(p, M);
    return std::pow(phi, 1.0 - p) * tr / static_cast<double>(M.rows()) - phi;
}

/// Directional derivative of 1 / aᵀM⁻¹a at M toward I.
inline double c_sensitivity(const Vector& a, const Matrix& M, const Matrix& I) {
    const Vector b = M.fullPivLu().solve(a);
    const double phi = 1.0 / a.dot(b);
    return phi * phi * b.dot(I * b) - phi;
}

inline std::vector<double> sorted_uniform(std::mt19937_64& rng, std::size_t count, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> xs(count);
    for (auto& x : xs) x = u(rng);
    std::sort(xs.begin(), xs.end());
    return xs;
}

inline std::vector<double> dirichlet(std::mt19937_64& rng, std::size_t count) {
    std::gamma_distribution<double> g(1.0, 1.0);
    std::vector<double> w(count);
    double s = 0.0;
    for (auto& x : w) s += (x = g(rng) + 1e-3);
    for (auto& x : w) x /= s;
    return w;
}

} // namespace satdesign::oracle
