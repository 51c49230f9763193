#include "satdesign/oracles.hpp"

#include "satdesign/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace satdesign {

namespace {

constexpr double kKktTolerance = 1e-10;
constexpr double kKktStallTolerance = 1e-7;
constexpr int kStallIterations = 20;
constexpr double kMomentTolerance = 1e-13;
// Support points closer than this fraction of the region are merged.
constexpr double kClusterFraction = 1e-3;

struct Interval {
    double lower;
    double upper;
};

Interval bounded_region(const DesignSpace& region, const char* what) {
    if (!region.bounded()) throw ClosedFormError(std::string(what) + " needs a bounded region");
    return {region.lower(), region.upper()};
}

// Principal branch of Lambert W on [0, ∞).
double lambert_w(double y) {
    double w = std::log1p(y);
    for (int i = 0; i < 50; ++i) {
        const double e = std::exp(w);
        const double step = (w * e - y) / (e * (w + 1.0));
        w -= step;
        if (std::abs(step) < 1e-16 * (1.0 + std::abs(w))) break;
    }
    return w;
}

Design poisson_design(const Model& model, const DesignSpace& region, double offset, double far_weight) {
    const double t2 = model.theta()(1);
    if (t2 > 0.0) {
        if (!region.upper_finite()) throw ClosedFormError("Poisson closed form with theta2 > 0 needs a finite upper end");
        const double x = region.upper() - offset / t2;
        if (!region.contains(x)) throw ClosedFormError("Poisson closed-form support point lies outside the region");
        return Design({x, region.upper()}, {far_weight, 1.0 - far_weight});
    }
    if (!region.lower_finite()) throw ClosedFormError("Poisson closed form with theta2 < 0 needs a finite lower end");
    const double x = region.lower() - offset / t2;
    if (!region.contains(x)) throw ClosedFormError("Poisson closed-form support point lies outside the region");
    return Design({region.lower(), x}, {1.0 - far_weight, far_weight});
}

} // namespace

std::string to_string(ClosedFormTag tag) {
    switch (tag) {
    case ClosedFormTag::D: return "D";
    case ClosedFormTag::e2: return "e2";
    case ClosedFormTag::e3: return "e3";
    }
    return "unknown";
}

double emax_middle_point(double L, double U, double t3) {
    return (L * (U + t3) + U * (L + t3)) / (L + U + 2.0 * t3);
}

double log_linear_middle_point(double L, double U, double t3) {
    return (L + t3) * (U + t3) / (U - L) * std::log((U + t3) / (L + t3)) - t3;
}

Design closed_form(const Model& model, const DesignSpace& region, ClosedFormTag tag) {
    if (!model.natural_space().contains(region)) {
        throw DesignSpaceError("region " + region.to_string() + " exceeds the model's design space");
    }
    const Vector& t = model.theta();
    switch (model.kind()) {
    case ModelKind::poisson: {
        if (tag == ClosedFormTag::D) return poisson_design(model, region, 2.0, 0.5);
        if (tag == ClosedFormTag::e2) {
            const double u = 1.0 + lambert_w(std::exp(-1.0));
            return poisson_design(model, region, 2.0 * u, std::exp(u) / (1.0 + std::exp(u)));
        }
        break;
    }
    case ModelKind::emax: {
        const auto [L, U] = bounded_region(region, "Emax closed form");
        const double t3 = t(2);
        const double xe = emax_middle_point(L, U, t3);
        if (tag == ClosedFormTag::D) return Design({L, xe, U}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
        if (tag == ClosedFormTag::e3) return Design({L, xe, U}, {0.25, 0.5, 0.25});
        if (tag == ClosedFormTag::e2) {
            if (!(std::abs((U - L) * t3) < std::abs(2.0 * (t3 * t3 - L * U)))) {
                std::ostringstream os;
                os << "Emax e2 closed form inapplicable: |(U-L)theta3| = " << std::abs((U - L) * t3)
                   << " is not below |2(theta3^2 - LU)| = " << std::abs(2.0 * (t3 * t3 - L * U));
                throw ClosedFormError(os.str());
            }
            const double q = (U - L) * t3 / (8.0 * (t3 * t3 - L * U));
            return Design({L, xe, U}, {0.25 - q, 0.5, 0.25 + q});
        }
        break;
    }
    case ModelKind::log_linear: {
        const auto [L, U] = bounded_region(region, "log-linear closed form");
        const double t3 = t(2);
        const double xl = log_linear_middle_point(L, U, t3);
        if (tag == ClosedFormTag::D) return Design({L, xl, U}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
        if (tag == ClosedFormTag::e3) {
            const double wl = (std::log(xl + t3) - std::log(U + t3)) / (2.0 * (std::log(L + t3) - std::log(U + t3)));
            return Design({L, xl, U}, {wl, 0.5, 0.5 - wl});
        }
        if (tag == ClosedFormTag::e2) {
            const double den = 2.0 * (U - L) * (xl + t3);
            return Design({L, xl, U}, {(U - xl) * (L + t3) / den, 0.5, (xl - L) * (U + t3) / den});
        }
        break;
    }
    default: break;
    }
    throw ClosedFormError("no closed form registered for model '" + model.name() + "' and criterion " + to_string(tag));
}

void GridSpec::validate() const {
    if (kappa < 2) throw Error("grid needs at least two points");
    if (coarse && (*coarse < 2 || *coarse >= kappa)) throw Error("coarse grid size must lie in [2, kappa)");
    if (refine_radius == 0) throw Error("refine_radius must be positive");
}

double GridSpec::step(const DesignSpace& region) const {
    return (region.finite_upper() - region.finite_lower()) / static_cast<double>(kappa - 1);
}

WeightResult weight_optimize(const Model& model, const CriterionSpec& crit, const std::vector<double>& support,
                             const std::vector<double>& initial_weights) {
    const std::size_t n = support.size();
    if (n == 0) throw DesignError("weight optimization needs at least one support point");
    const auto d = static_cast<Eigen::Index>(model.dim());
    std::vector<Matrix> unit(n);
    for (std::size_t i = 0; i < n; ++i) unit[i] = model.unit_info(support[i]);

    std::vector<double> w = initial_weights;
    if (w.empty()) w.assign(n, 1.0 / static_cast<double>(n));
    if (w.size() != n) throw DesignError("initial weights do not match the support");
    {
        double total = 0.0;
        for (double v : w) {
            if (!(v >= 0.0)) throw DesignError("initial weights must be nonnegative");
            total += v;
        }
        if (!(total > 0.0)) throw DesignError("initial weights must not all vanish");
        for (double& v : w) v /= total;
    }

    auto info = [&](const std::vector<double>& ww) {
        Matrix M = Matrix::Zero(d, d);
        for (std::size_t i = 0; i < n; ++i)
            if (ww[i] > 0.0) M += ww[i] * unit[i];
        return M;
    };
    auto log_value = [&](const std::vector<double>& ww) {
        const double v = phi_value(crit, info(ww));
        return v > 0.0 ? std::log(v) : -kInfinity;
    };
    // ∂ log Φ / ∂w_i for every candidate
    auto grads = [&](const std::vector<double>& ww, std::vector<double>& g) {
        const Matrix M = info(ww);
        const double phi = phi_value(crit, M);
        const Matrix G = phi_gradient(crit, M);
        g.resize(n);
        for (std::size_t i = 0; i < n; ++i) g[i] = linalg::inner(G, unit[i]) / phi;
        return phi;
    };

    WeightResult result;
    if (!std::isfinite(log_value(w))) throw SingularMatrixError("initial weights give a singular information matrix");

    std::vector<double> g;
    double best_kkt = kInfinity;
    int since_best = 0;
    for (int it = 0; it < 500; ++it) {
        result.iterations = it;
        grads(w, g);
        std::vector<std::size_t> active, inactive;
        for (std::size_t i = 0; i < n; ++i) (w[i] > 0.0 ? active : inactive).push_back(i);
        double active_res = 0.0;
        for (auto i : active) active_res = std::max(active_res, std::abs(g[i] - 1.0));
        double best_add = 0.0;
        std::size_t add = n;
        for (auto i : inactive) {
            if (g[i] - 1.0 > best_add) {
                best_add = g[i] - 1.0;
                add = i;
            }
        }
        result.kkt_residual = std::max(active_res, best_add);
        if (result.kkt_residual <= kKktTolerance) break;
        // Nearly coincident support points leave a flat direction that
        // Newton cannot resolve below rounding; stop once progress stalls.
        if (result.kkt_residual < 0.5 * best_kkt) {
            best_kkt = result.kkt_residual;
            since_best = 0;
        } else if (++since_best >= kStallIterations && result.kkt_residual <= kKktStallTolerance) {
            break;
        }
        if (add < n && (active_res <= 0.1 * best_add || active.size() == 1)) {
            const double eps = std::min(0.1, 0.5 * best_add) / static_cast<double>(active.size() + 1);
            for (auto i : active) w[i] *= 1.0 - eps;
            w[add] = eps;
            continue;
        }
        if (active.size() == 1) break;

        // Newton on the reduced active weights w_{a_1..}, with w_{a_0} = 1 - Σ.
        const auto na = static_cast<Eigen::Index>(active.size() - 1);
        auto reduced_grad = [&](const std::vector<double>& ww, Vector& r) {
            std::vector<double> gg;
            grads(ww, gg);
            r.resize(na);
            for (Eigen::Index j = 0; j < na; ++j) r(j) = gg[active[static_cast<std::size_t>(j) + 1]] - gg[active[0]];
        };
        Vector r;
        reduced_grad(w, r);
        Matrix H(na, na);
        double wmin = 1.0;
        for (auto i : active) wmin = std::min(wmin, w[i]);
        const double h = std::min(1e-6, 0.25 * wmin);
        for (Eigen::Index j = 0; j < na; ++j) {
            auto wp = w, wm = w;
            const std::size_t i = active[static_cast<std::size_t>(j) + 1];
            wp[i] += h;
            wp[active[0]] -= h;
            wm[i] -= h;
            wm[active[0]] += h;
            Vector rp, rm;
            reduced_grad(wp, rp);
            reduced_grad(wm, rm);
            H.col(j) = (rp - rm) / (2.0 * h);
        }
        const auto eig = linalg::symmetric_eigen(linalg::symmetrize(H));
        const double top = eig.values.cwiseAbs().maxCoeff();
        Vector inv(na);
        for (Eigen::Index i = 0; i < na; ++i) inv(i) = 1.0 / std::max(std::abs(eig.values(i)), std::max(1e-12 * top, 1e-300));
        const Vector dz = eig.vectors * inv.asDiagonal() * eig.vectors.transpose() * r;

        std::vector<double> dw(n, 0.0);
        for (Eigen::Index j = 0; j < na; ++j) {
            dw[active[static_cast<std::size_t>(j) + 1]] = dz(j);
            dw[active[0]] -= dz(j);
        }
        double alpha_max = kInfinity;
        std::size_t blocking = n;
        for (auto i : active) {
            if (dw[i] < 0.0 && -w[i] / dw[i] < alpha_max) {
                alpha_max = -w[i] / dw[i];
                blocking = i;
            }
        }
        const double f0 = log_value(w);
        const double slope = r.dot(dz);
        double alpha = std::min(1.0, alpha_max);
        bool accepted = false;
        while (alpha > 1e-16) {
            auto trial = w;
            for (auto i : active) trial[i] = std::max(0.0, w[i] + alpha * dw[i]);
            if (alpha == alpha_max) trial[blocking] = 0.0;
            const double ft = log_value(trial);
            if (std::isfinite(ft) && ft >= f0 + 1e-4 * alpha * slope) {
                w = trial;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) break;
        const double total = std::accumulate(w.begin(), w.end(), 0.0);
        for (double& v : w) v /= total;
    }
    const double phi = grads(w, g);
    result.weights = w;
    result.criterion_value = phi;
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) res = std::max(res, w[i] > 0.0 ? std::abs(g[i] - 1.0) : std::max(0.0, g[i] - 1.0));
    result.kkt_residual = res;
    return result;
}

namespace {

// OWEA over the candidate indices of a fixed grid.
struct GridRun {
    std::vector<std::size_t> support;
    std::vector<double> weights;
    double value = 0.0;
    double max_sensitivity = 0.0;
    int iterations = 0;
};

class GridOracle {
public:
    GridOracle(const Model& model, const CriterionSpec& crit, double lower, double step, std::size_t kappa)
        : model_(model), crit_(crit), lower_(lower), step_(step), kappa_(kappa), f_(kappa) {}

    double x(std::size_t i) const { return i + 1 == kappa_ ? lower_ + step_ * static_cast<double>(kappa_ - 1) : lower_ + step_ * static_cast<double>(i); }
    std::size_t evaluated() const { return evaluated_; }

    // √w f at grid point i, computed on first use.
    const Vector& ftilde(std::size_t i) {
        if (f_[i].size() == 0) {
            const double xi = x(i);
            f_[i] = std::sqrt(model_.weight(xi)) * model_.gradient(xi);
            ++evaluated_;
        }
        return f_[i];
    }

    GridRun run(std::vector<std::size_t> support, std::vector<double> weights, const std::vector<std::size_t>& candidates,
                const OweaOptions& opts) {
        GridRun out;
        int repeats = 0;
        for (int it = 0; it < opts.max_iter; ++it) {
            out.iterations = it + 1;
            std::vector<double> pts;
            for (auto i : support) pts.push_back(x(i));
            const WeightResult wr = weight_optimize(model_, crit_, pts, weights);
            std::vector<std::size_t> kept;
            std::vector<double> kw;
            for (std::size_t j = 0; j < support.size(); ++j) {
                if (wr.weights[j] > 0.0) {
                    kept.push_back(support[j]);
                    kw.push_back(wr.weights[j]);
                }
            }
            support = kept;
            weights = kw;
            const auto d = static_cast<Eigen::Index>(model_.dim());
            Matrix M = Matrix::Zero(d, d);
            for (std::size_t j = 0; j < support.size(); ++j) {
                const Vector& f = ftilde(support[j]);
                M += weights[j] * f * f.transpose();
            }
            const double phi = phi_value(crit_, M);
            const Matrix G = phi_gradient(crit_, M);
            const double base = linalg::inner(G, M);
            double best = -kInfinity;
            std::size_t arg = candidates.front();
            for (auto i : candidates) {
                const Vector& f = ftilde(i);
                const double psi = f.dot(G * f) - base;
                if (psi > best) {
                    best = psi;
                    arg = i;
                }
            }
            out.value = phi;
            out.max_sensitivity = best;
            if (best <= opts.sensitivity_tol * phi) break;
            if (std::find(support.begin(), support.end(), arg) != support.end()) {
                if (++repeats > 3) break;
                continue;
            }
            const double eps = 1.0 / static_cast<double>(support.size() + 1);
            for (double& w : weights) w *= 1.0 - eps;
            support.push_back(arg);
            weights.push_back(eps);
        }
        out.support = support;
        out.weights = weights;
        return out;
    }

private:
    const Model& model_;
    const CriterionSpec& crit_;
    double lower_;
    double step_;
    std::size_t kappa_;
    std::vector<Vector> f_;
    std::size_t evaluated_ = 0;
};

// Merges support points that lie within `radius` grid steps of a neighbour:
// weights are summed and the point snaps to the grid index nearest their
// weighted mean.
Design cluster(const GridOracle& grid, std::vector<std::size_t> support, std::vector<double> weights, std::size_t radius) {
    std::vector<std::size_t> order(support.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return support[a] < support[b]; });
    std::vector<double> pts, ws;
    std::size_t i = 0;
    while (i < order.size()) {
        double wsum = weights[order[i]];
        double isum = weights[order[i]] * static_cast<double>(support[order[i]]);
        std::size_t last = support[order[i]];
        std::size_t j = i + 1;
        while (j < order.size() && support[order[j]] - last <= radius) {
            wsum += weights[order[j]];
            isum += weights[order[j]] * static_cast<double>(support[order[j]]);
            last = support[order[j]];
            ++j;
        }
        pts.push_back(grid.x(static_cast<std::size_t>(std::llround(isum / wsum))));
        ws.push_back(wsum);
        i = j;
    }
    return Design(pts, ws);
}

// `count` evenly spaced indices of a κ-point grid; `interior` keeps them off
// the grid ends, where the information may vanish.
std::vector<std::size_t> spread(std::size_t count, std::size_t kappa, bool interior) {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < count; ++j) {
        const double t = interior ? (static_cast<double>(j) + 1.0) / (static_cast<double>(count) + 1.0)
                                  : (count == 1 ? 0.5 : static_cast<double>(j) / static_cast<double>(count - 1));
        out.push_back(static_cast<std::size_t>(std::llround(t * static_cast<double>(kappa - 1))));
    }
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace

OweaReport owea_solve(const Model& model, const CriterionSpec& crit_in, const DesignSpace& region, const GridSpec& grid,
                      const OweaOptions& opts) {
    grid.validate();
    if (!region.bounded()) throw DesignSpaceError("OWEA needs a bounded region");
    if (!model.natural_space().contains(region)) {
        throw DesignSpaceError("region " + region.to_string() + " exceeds the model's design space");
    }
    crit_in.validate(model.dim());
    if (crit_in.kind == CriterionSpec::Kind::compound && !crit_in.references_resolved()) {
        throw CriterionError("OWEA needs compound reference values resolved beforehand");
    }
    const CriterionSpec& crit = crit_in;
    const std::size_t d = model.dim();
    const std::size_t kappa = grid.kappa;
    GridOracle oracle(model, crit, region.lower(), grid.step(region), kappa);

    std::vector<std::size_t> all(kappa);
    std::iota(all.begin(), all.end(), 0);

    GridRun result;
    int total_iterations = 0;
    if (!grid.coarse) {
        const auto start = spread(d, kappa, true);
        result = oracle.run(start, std::vector<double>(start.size(), 1.0 / static_cast<double>(start.size())), all, opts);
        total_iterations = result.iterations;
    } else {
        const std::size_t k0 = *grid.coarse;
        const auto coarse = spread(k0, kappa, false);
        const auto start = spread(d, k0, true);
        std::vector<std::size_t> s0;
        for (auto j : start) s0.push_back(coarse[j]);
        result = oracle.run(s0, std::vector<double>(s0.size(), 1.0 / static_cast<double>(s0.size())), coarse, opts);
        total_iterations = result.iterations;
        const double cell = static_cast<double>(kappa - 1) / static_cast<double>(k0 - 1);
        const auto radius = static_cast<std::ptrdiff_t>(std::ceil(static_cast<double>(grid.refine_radius) * cell));
        std::vector<char> in_window(kappa, 0);
        std::vector<std::size_t> centers = result.support;
        for (int round = 0; round < opts.max_iter; ++round) {
            for (auto c : centers) {
                const auto lo = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(c) - radius);
                const auto hi = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(kappa) - 1, static_cast<std::ptrdiff_t>(c) + radius);
                for (auto i = lo; i <= hi; ++i) in_window[static_cast<std::size_t>(i)] = 1;
            }
            std::vector<std::size_t> window;
            for (std::size_t i = 0; i < kappa; ++i)
                if (in_window[i]) window.push_back(i);
            result = oracle.run(result.support, result.weights, window, opts);
            total_iterations += result.iterations;
            // recheck against the full grid
            const GridRun check = oracle.run(result.support, result.weights, all, OweaOptions{opts.sensitivity_tol, 1});
            if (check.max_sensitivity <= opts.sensitivity_tol * check.value) break;
            const auto d_idx = static_cast<Eigen::Index>(d);
            Matrix M = Matrix::Zero(d_idx, d_idx);
            for (std::size_t j = 0; j < result.support.size(); ++j) {
                const Vector& f = oracle.ftilde(result.support[j]);
                M += result.weights[j] * f * f.transpose();
            }
            const Matrix G = phi_gradient(crit, M);
            const double base = linalg::inner(G, M);
            std::size_t arg = 0;
            double best = -kInfinity;
            for (std::size_t i = 0; i < kappa; ++i) {
                const Vector& f = oracle.ftilde(i);
                const double psi = f.dot(G * f) - base;
                if (psi > best) {
                    best = psi;
                    arg = i;
                }
            }
            if (in_window[arg]) break;
            centers = {arg};
        }
    }

    OweaReport report;
    const auto radius = std::max<std::size_t>(
        2, static_cast<std::size_t>(std::ceil(kClusterFraction * static_cast<double>(kappa - 1))));
    report.design = cluster(oracle, result.support, result.weights, radius);
    report.criterion_value = result.value;
    report.max_sensitivity = result.max_sensitivity;
    report.iterations = total_iterations;
    report.grid_points = oracle.evaluated();
    return report;
}

namespace {

struct MomentProblem {
    const ClassDescriptor& desc;
    std::size_t n_free;
    bool low_fixed;    // smallest c is a fixed endpoint
    bool high_fixed;   // largest c is a fixed endpoint
    double c_low;
    double c_high;

    std::vector<double> points(const Vector& u) const {
        std::vector<double> c;
        if (low_fixed) c.push_back(c_low);
        for (std::size_t j = 0; j < n_free; ++j) c.push_back(u(static_cast<Eigen::Index>(j)));
        if (high_fixed) c.push_back(c_high);
        return c;
    }

    Vector moments(const Vector& u) const {
        const auto c = points(u);
        Vector mu = Vector::Zero(static_cast<Eigen::Index>(desc.k));
        for (std::size_t i = 0; i < c.size(); ++i) {
            const double w = u(static_cast<Eigen::Index>(n_free + i));
            for (std::size_t l = 0; l < desc.k; ++l) mu(static_cast<Eigen::Index>(l)) += w * desc.psi[l](c[i]);
        }
        return mu;
    }

    Matrix jacobian(const Vector& u) const {
        const auto c = points(u);
        const auto k = static_cast<Eigen::Index>(desc.k);
        Matrix J(k, u.size());
        const std::size_t offset = low_fixed ? 1 : 0;
        for (std::size_t j = 0; j < n_free; ++j) {
            const double cj = c[j + offset];
            const double w = u(static_cast<Eigen::Index>(n_free + j + offset));
            const double h = 1e-6 * (1.0 + std::abs(cj));
            for (std::size_t l = 0; l < desc.k; ++l) {
                J(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(j)) =
                    w * (desc.psi[l](cj + h) - desc.psi[l](cj - h)) / (2.0 * h);
            }
        }
        for (std::size_t i = 0; i < c.size(); ++i)
            for (std::size_t l = 0; l < desc.k; ++l)
                J(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(n_free + i)) = desc.psi[l](c[i]);
        return J;
    }

    // Largest step keeping points ordered inside (c_low, c_high) and weights
    // positive, scaled by `fraction`.
    double max_step(const Vector& u, const Vector& du, double fraction) const {
        const auto c = points(u);
        const auto c1 = points(u + du);
        double alpha = 1.0;
        auto limit = [&](double s0, double s1) {
            if (s1 < s0 && s0 > 0.0) alpha = std::min(alpha, fraction * s0 / (s0 - s1));
        };
        for (std::size_t i = 0; i + 1 < c.size(); ++i) limit(c[i + 1] - c[i], c1[i + 1] - c1[i]);
        if (!low_fixed && std::isfinite(c_low)) limit(c.front() - c_low, c1.front() - c_low);
        if (!high_fixed && std::isfinite(c_high)) limit(c_high - c.back(), c_high - c1.back());
        for (Eigen::Index i = static_cast<Eigen::Index>(n_free); i < u.size(); ++i) limit(u(i), u(i) + du(i));
        return alpha;
    }
};

double scaled_residual(const Vector& r, const Vector& scale) {
    return (r.array().abs() / scale.array()).maxCoeff();
}

bool newton_moments(const MomentProblem& prob, Vector& u, const Vector& target, const Vector& scale, double tol) {
    for (int it = 0; it < 60; ++it) {
        const Vector r = prob.moments(u) - target;
        const double res = scaled_residual(r, scale);
        if (res <= tol) return true;
        const Matrix J = prob.jacobian(u);
        const Vector du = -J.fullPivLu().solve(r);
        if (!du.allFinite()) return false;
        double alpha = prob.max_step(u, du, 0.9);
        bool improved = false;
        while (alpha > 1e-12) {
            const Vector trial = u + alpha * du;
            if (scaled_residual(prob.moments(trial) - target, scale) < res) {
                u = trial;
                improved = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!improved) return res <= 1e3 * tol;
    }
    return scaled_residual(prob.moments(u) - target, scale) <= tol;
}

} // namespace

Design moment_match_reduce(const ClassDescriptor& desc, const Design& design) {
    if (!desc.has_psi()) throw NoCompleteClassError("no Psi system registered for this class");
    if (desc.psi.size() != desc.k) throw NoCompleteClassError("Psi system size does not match k");
    if (design.empty()) throw DesignError("design must not be empty");
    for (double x : design.points()) {
        if (!desc.region.contains(x)) throw DesignSpaceError("design point lies outside the class region");
    }
    const Design input = design.pruned(0.0);

    const auto& T = desc.c_transform;
    const double cl = T.forward(desc.region.lower());
    const double cu = T.forward(desc.region.upper());
    MomentProblem prob{desc, desc.free_points(),
                       T.increasing ? desc.fix_lower : desc.fix_upper,
                       T.increasing ? desc.fix_upper : desc.fix_lower,
                       std::min(cl, cu), std::max(cl, cu)};

    // Already in the class: only the free slots may hold non-fixed points.
    std::size_t loose = 0;
    for (double x : input.points()) {
        const bool fixed = (desc.fix_lower && x == desc.region.lower()) || (desc.fix_upper && x == desc.region.upper());
        if (!fixed) ++loose;
    }
    if (loose <= prob.n_free) return design;

    std::vector<double> c_in;
    for (double x : input.points()) c_in.push_back(T.forward(x));
    const double hull_lo = *std::min_element(c_in.begin(), c_in.end());
    const double hull_hi = *std::max_element(c_in.begin(), c_in.end());

    // Canonical start: free points evenly inside the input hull, equal weights.
    const auto nu = static_cast<Eigen::Index>(prob.n_free + desc.m);
    Vector u(nu);
    for (std::size_t j = 0; j < prob.n_free; ++j) {
        u(static_cast<Eigen::Index>(j)) =
            hull_lo + (hull_hi - hull_lo) * (static_cast<double>(j) + 1.0) / (static_cast<double>(prob.n_free) + 1.0);
    }
    for (std::size_t i = 0; i < desc.m; ++i) u(static_cast<Eigen::Index>(prob.n_free + i)) = 1.0 / static_cast<double>(desc.m);

    Vector target = Vector::Zero(static_cast<Eigen::Index>(desc.k));
    Vector scale = Vector::Zero(static_cast<Eigen::Index>(desc.k));
    for (std::size_t i = 0; i < input.size(); ++i) {
        for (std::size_t l = 0; l < desc.k; ++l) {
            const double v = desc.psi[l](c_in[i]);
            target(static_cast<Eigen::Index>(l)) += input.weight(i) * v;
            scale(static_cast<Eigen::Index>(l)) += input.weight(i) * std::abs(v);
        }
    }
    scale = scale.cwiseMax(1e-300);
    const Vector start = prob.moments(u);

    // Continuation along the segment between the start and target moments.
    double t = 0.0;
    double dt = 0.25;
    while (t < 1.0) {
        const double t1 = std::min(1.0, t + dt);
        Vector trial = u;
        const Vector mid = (1.0 - t1) * start + t1 * target;
        if (newton_moments(prob, trial, mid, scale, t1 < 1.0 ? 1e-9 : kMomentTolerance)) {
            u = trial;
            t = t1;
            dt = std::min(0.5, 2.0 * dt);
        } else {
            dt *= 0.5;
            if (dt < 1e-10) throw ConvergenceError("moment matching continuation stalled");
        }
    }

    const auto c = prob.points(u);
    std::vector<double> x, w;
    for (std::size_t i = 0; i < c.size(); ++i) {
        double xi = T.inverse(c[i]);
        if (prob.low_fixed && i == 0) xi = T.increasing ? desc.region.lower() : desc.region.upper();
        if (prob.high_fixed && i + 1 == c.size()) xi = T.increasing ? desc.region.upper() : desc.region.lower();
        x.push_back(xi);
        w.push_back(u(static_cast<Eigen::Index>(prob.n_free + i)));
    }
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& v : w) v /= total;
    return Design(x, w);
}

std::string to_string(LoewnerOrder order) {
    switch (order) {
    case LoewnerOrder::equal: return "equal";
    case LoewnerOrder::dominates: return "dominates";
    case LoewnerOrder::dominated: return "dominated";
    case LoewnerOrder::incomparable: return "incomparable";
    }
    return "unknown";
}

LoewnerOrder loewner_compare(const Matrix& m1, const Matrix& m2) {
    if (m1.rows() != m2.rows() || m1.cols() != m2.cols()) throw Error("Loewner comparison needs matrices of equal size");
    const auto eig = linalg::symmetric_eigen(linalg::symmetrize(m1 - m2));
    const double tol = 1e-10 * std::max({m1.norm(), m2.norm(), 1e-300});
    const double lo = eig.values.minCoeff();
    const double hi = eig.values.maxCoeff();
    if (lo >= -tol && hi <= tol) return LoewnerOrder::equal;
    if (lo >= -tol) return LoewnerOrder::dominates;
    if (hi <= tol) return LoewnerOrder::dominated;
    return LoewnerOrder::incomparable;
}

} // namespace satdesign
