#include "satdesign/solver.hpp"

#include "satdesign/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

namespace satdesign {

namespace {

constexpr double kWindowScales = 10.0;
constexpr double kHardCapScales = 1e4;
constexpr double kWeightBoundary = 1e-12;
constexpr double kPointBoundary = 1e-10;
constexpr double kNoiseGradient = 1e-7;
constexpr double kLocalGradient = 1e-4;
constexpr double kStepNoise = 1e-10;
constexpr double kValueNoise = 1e-10;
constexpr double kTieTolerance = 1e-10;
constexpr double kAgreementTolerance = 1e-6;
constexpr int kMaxFallbacks = 4;

double neg_inf() { return -std::numeric_limits<double>::infinity(); }

} // namespace

void SolveOptions::validate() const {
    if (max_iter <= 0) throw Error("max_iter must be positive");
    if (!(grad_tol > 0.0)) throw Error("grad_tol must be positive");
    if (!(armijo > 0.0 && armijo < 0.5)) throw Error("armijo must lie in (0, 0.5)");
    if (!(backtrack > 0.0 && backtrack < 1.0)) throw Error("backtrack must lie in (0, 1)");
    if (!(boundary_fraction > 0.0 && boundary_fraction < 1.0)) throw Error("boundary_fraction must lie in (0, 1)");
    if (multistart < 1) throw Error("multistart must be at least 1");
    if (!(sensitivity_tol > 0.0)) throw Error("sensitivity_tol must be positive");
    for (std::size_t i = 0; i < epsilon_schedule.size(); ++i) {
        if (!(epsilon_schedule[i] > 0.0)) throw Error("epsilon schedule entries must be positive");
        if (i > 0 && !(epsilon_schedule[i] < epsilon_schedule[i - 1])) {
            throw Error("epsilon schedule must be strictly decreasing");
        }
    }
}

Vector ZVector::to_vector() const {
    Vector z(static_cast<Eigen::Index>(size()));
    Eigen::Index i = 0;
    for (double x : free_points) z(i++) = x;
    for (double w : free_weights) z(i++) = w;
    return z;
}

ZVector ZVector::from_vector(const Vector& z, std::size_t n_points) {
    ZVector out;
    out.free_points.assign(z.data(), z.data() + n_points);
    out.free_weights.assign(z.data() + n_points, z.data() + z.size());
    return out;
}

ReducedObjective::ReducedObjective(const Model& model, CriterionSpec crit, DesignSpace region, std::size_t m,
                                   bool fix_lower, bool fix_upper)
    : model_(&model), crit_(std::move(crit)), region_(region), m_(m), fix_lower_(fix_lower), fix_upper_(fix_upper) {
    if (m == 0) throw Error("class size m must be positive");
    if (fix_lower) region.finite_lower();
    if (fix_upper) region.finite_upper();
    if (fix_lower && fix_upper && m < 2) throw Error("two fixed endpoints need m >= 2");
}

void ReducedObjective::unpack(const ZVector& z, std::vector<double>& points, std::vector<double>& weights) const {
    points.clear();
    weights.clear();
    if (fix_lower_) points.push_back(region_.lower());
    points.insert(points.end(), z.free_points.begin(), z.free_points.end());
    if (fix_upper_) points.push_back(region_.upper());
    double rest = 1.0;
    for (double w : z.free_weights) rest -= w;
    weights.push_back(rest);
    weights.insert(weights.end(), z.free_weights.begin(), z.free_weights.end());
}

Design ReducedObjective::assemble(const ZVector& z) const {
    std::vector<double> x, w;
    unpack(z, x, w);
    for (double& v : w) v = std::max(v, 0.0);
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& v : w) v /= total;
    return Design(std::move(x), std::move(w));
}

ZVector ReducedObjective::encode(const Design& design) const {
    if (design.size() != m_) throw DesignError("design size does not match the class size");
    if (fix_lower_ && design.point(0) != region_.lower()) throw DesignError("design misses the fixed lower endpoint");
    if (fix_upper_ && design.point(m_ - 1) != region_.upper()) throw DesignError("design misses the fixed upper endpoint");
    ZVector z;
    const std::size_t first = fix_lower_ ? 1 : 0;
    const std::size_t last = fix_upper_ ? m_ - 1 : m_;
    for (std::size_t i = first; i < last; ++i) z.free_points.push_back(design.point(i));
    for (std::size_t i = 1; i < m_; ++i) z.free_weights.push_back(design.weight(i));
    return z;
}

Matrix ReducedObjective::information(const ZVector& z) const {
    std::vector<double> x, w;
    unpack(z, x, w);
    const auto d = static_cast<Eigen::Index>(model_->dim());
    Matrix M = Matrix::Zero(d, d);
    for (std::size_t i = 0; i < x.size(); ++i) M += w[i] * model_->unit_info(x[i]);
    return M;
}

double ReducedObjective::value(const ZVector& z) const {
    try {
        const double v = phi_value(crit_, information(z));
        return std::isfinite(v) ? v : 0.0;
    } catch (const EstimabilityError&) {
        return 0.0;
    }
}

Vector ReducedObjective::gradient(const ZVector& z) const {
    Vector g;
    const double v = log_value_and_gradient(z, g);
    return g * std::exp(v);
}

double ReducedObjective::log_value_and_gradient(const ZVector& z, Vector& grad) const {
    std::vector<double> x, w;
    unpack(z, x, w);
    const auto d = static_cast<Eigen::Index>(model_->dim());
    std::vector<Matrix> unit(x.size());
    Matrix M = Matrix::Zero(d, d);
    for (std::size_t i = 0; i < x.size(); ++i) {
        unit[i] = model_->unit_info(x[i]);
        M += w[i] * unit[i];
    }
    const double phi = phi_value(crit_, M);
    if (!(phi > 0.0)) throw SingularMatrixError("criterion value is zero at this design");
    const Matrix G = phi_gradient(crit_, M);
    grad.resize(static_cast<Eigen::Index>(z.size()));
    const std::size_t offset = fix_lower_ ? 1 : 0;
    Eigen::Index k = 0;
    for (std::size_t j = 0; j < z.free_points.size(); ++j) {
        const std::size_t i = j + offset;
        grad(k++) = w[i] * linalg::inner(G, model_->unit_info_dx(x[i])) / phi;
    }
    const double base = linalg::inner(G, unit[0]);
    for (std::size_t i = 1; i < x.size(); ++i) grad(k++) = (linalg::inner(G, unit[i]) - base) / phi;
    return std::log(phi);
}

std::size_t ReducedObjective::point_constraint_count() const {
    // gaps between consecutive points plus one bound per unfixed finite end
    std::size_t n = m_ - 1;
    if (!fix_lower_) ++n;
    if (!fix_upper_) ++n;
    return n;
}

std::vector<double> ReducedObjective::slacks(const ZVector& z) const {
    std::vector<double> x, w;
    unpack(z, x, w);
    std::vector<double> s;
    const double cap = kHardCapScales * model_->scale();
    for (std::size_t i = 0; i + 1 < x.size(); ++i) s.push_back(x[i + 1] - x[i]);
    if (!fix_lower_) {
        s.push_back(region_.lower_finite() ? x.front() - region_.lower() : x.front() - (region_.upper_finite() ? region_.upper() - cap : -cap));
    }
    if (!fix_upper_) {
        s.push_back(region_.upper_finite() ? region_.upper() - x.back() : (region_.lower_finite() ? region_.lower() + cap : cap) - x.back());
    }
    s.insert(s.end(), w.begin(), w.end());
    return s;
}

double ReducedObjective::max_step(const ZVector& z, const Vector& dz, double fraction, int& binding) const {
    const std::vector<double> s0 = slacks(z);
    ZVector moved = ZVector::from_vector(z.to_vector() + dz, z.free_points.size());
    const std::vector<double> s1 = slacks(moved);
    double alpha = 1.0;
    binding = -1;
    for (std::size_t i = 0; i < s0.size(); ++i) {
        const double rate = s1[i] - s0[i];
        if (rate >= 0.0) continue;
        const double limit = fraction * s0[i] / -rate;
        if (limit < alpha) {
            alpha = limit;
            binding = static_cast<int>(i);
        }
    }
    return std::max(alpha, 0.0);
}

double objective(const Model& model, const CriterionSpec& crit, const ClassDescriptor& desc, const ZVector& z) {
    return ReducedObjective(model, crit, desc.region, desc.m, desc.fix_lower, desc.fix_upper).value(z);
}

Vector objective_gradient(const Model& model, const CriterionSpec& crit, const ClassDescriptor& desc, const ZVector& z) {
    return ReducedObjective(model, crit, desc.region, desc.m, desc.fix_lower, desc.fix_upper).gradient(z);
}

DesignSpace full_region(const Model& model) { return model.natural_space(); }

namespace {

enum class RunStatus { converged, boundary, stalled, max_iter, diverged };

struct RunResult {
    RunStatus status = RunStatus::stalled;
    ZVector z;
    double value = 0.0;
    double grad_norm = kInfinity;
    int iterations = 0;
    int binding = -1;
    std::vector<double> trace;
};

struct Window {
    double lo;
    double hi;
};

Window search_window(const Model& model, const DesignSpace& region) {
    const double s = model.scale();
    if (region.bounded()) return {region.lower(), region.upper()};
    if (region.lower_finite()) return {region.lower(), region.lower() + kWindowScales * s};
    if (region.upper_finite()) return {region.upper() - kWindowScales * s, region.upper()};
    return {model.center() - 0.5 * kWindowScales * s, model.center() + 0.5 * kWindowScales * s};
}

// Evenly spread start: fixed ends sit on the window ends, free points fill
// the interior at equal spacing.
ZVector default_start(const ReducedObjective& obj, const Window& win) {
    const std::size_t m = obj.m();
    const std::size_t n_free = obj.free_point_count();
    ZVector z;
    const double lo = win.lo;
    const double hi = win.hi;
    const double slots = static_cast<double>(m) + (obj.fix_lower() ? 0.0 : 0.5) + (obj.fix_upper() ? 0.0 : 0.5) - 1.0;
    const double offset = obj.fix_lower() ? 1.0 : 0.5;
    for (std::size_t j = 0; j < n_free; ++j) z.free_points.push_back(lo + (hi - lo) * (static_cast<double>(j) + offset) / slots);
    z.free_weights.assign(m - 1, 1.0 / static_cast<double>(m));
    return z;
}

ZVector jittered_start(const ReducedObjective& obj, const Window& win, std::mt19937_64& rng) {
    ZVector z = default_start(obj, win);
    const std::size_t m = obj.m();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> x, w;
    obj.unpack(z, x, w);
    const double spacing = (win.hi - win.lo) / static_cast<double>(m + 1);
    for (double& p : z.free_points) p += (unit(rng) - 0.5) * 0.8 * spacing;
    std::gamma_distribution<double> gamma(1.0, 1.0);
    std::vector<double> dir(m);
    double total = 0.0;
    for (auto& v : dir) total += (v = gamma(rng));
    for (std::size_t i = 1; i < m; ++i) z.free_weights[i - 1] = 0.5 / static_cast<double>(m) + 0.5 * dir[i] / total;
    return z;
}

std::optional<ZVector> warm_start(const ReducedObjective& obj, const Design& design) {
    if (design.size() != obj.m()) return std::nullopt;
    std::vector<double> x(design.points().begin(), design.points().end());
    std::vector<double> w(design.weights().begin(), design.weights().end());
    const auto& region = obj.region();
    if (obj.fix_lower()) x.front() = region.lower();
    if (obj.fix_upper()) x.back() = region.upper();
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!region.contains(x[i])) return std::nullopt;
        if (i > 0 && !(x[i] > x[i - 1])) return std::nullopt;
    }
    double total = 0.0;
    for (double& v : w) total += (v = std::max(v, 1e-9));
    ZVector z;
    const std::size_t first = obj.fix_lower() ? 1 : 0;
    const std::size_t last = obj.fix_upper() ? x.size() - 1 : x.size();
    for (std::size_t i = first; i < last; ++i) z.free_points.push_back(x[i]);
    for (std::size_t i = 1; i < w.size(); ++i) z.free_weights.push_back(w[i] / total);
    return z;
}

double safe_log_value(const ReducedObjective& obj, const ZVector& z) {
    const double v = obj.value(z);
    return v > 0.0 ? std::log(v) : neg_inf();
}

bool try_gradient(const ReducedObjective& obj, const ZVector& z, Vector& g) {
    try {
        obj.log_value_and_gradient(z, g);
        return g.allFinite();
    } catch (const Error&) {
        return false;
    }
}

// Central differences of the analytic gradient, with steps capped well
// inside the constraints touching each coordinate.
Matrix fd_hessian(const ReducedObjective& obj, const ZVector& z) {
    const Vector z0 = z.to_vector();
    const auto n = z0.size();
    const std::size_t np = z.free_points.size();
    const std::vector<double> s = obj.slacks(z);
    const std::size_t n_point_constraints = obj.point_constraint_count();
    const double point_scale = obj.model().scale();
    const std::size_t offset = obj.fix_lower() ? 1 : 0;
    Matrix H(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double h;
        if (static_cast<std::size_t>(j) < np) {
            const std::size_t i = static_cast<std::size_t>(j) + offset;   // point index
            double room = kInfinity;
            if (i > 0) room = std::min(room, s[i - 1]);
            if (i + 1 < obj.m()) room = std::min(room, s[i]);
            for (std::size_t c = obj.m() - 1; c < n_point_constraints; ++c) room = std::min(room, s[c]);
            h = std::min(1e-5 * (point_scale + std::abs(z0(j))), 0.25 * room);
        } else {
            const std::size_t wi = static_cast<std::size_t>(j) - np + 1;   // weight index
            const double room = std::min(s[n_point_constraints + wi], s[n_point_constraints]);
            h = std::min(1e-5 * (1.0 + std::abs(z0(j))), 0.25 * room);
        }
        Vector zp = z0, zm = z0;
        zp(j) += h;
        zm(j) -= h;
        Vector gp, gm;
        const bool okp = try_gradient(obj, ZVector::from_vector(zp, np), gp);
        const bool okm = try_gradient(obj, ZVector::from_vector(zm, np), gm);
        if (okp && okm) {
            H.col(j) = (gp - gm) / (2.0 * h);
        } else {
            Vector g0;
            try_gradient(obj, z, g0);
            if (okp) H.col(j) = (gp - g0) / h;
            else if (okm) H.col(j) = (g0 - gm) / h;
            else H.col(j).setZero();
        }
    }
    return linalg::symmetrize(H);
}

bool binding_is_weight(const ReducedObjective& obj, int binding) {
    return binding >= static_cast<int>(obj.point_constraint_count());
}

bool at_boundary(const ReducedObjective& obj, const ZVector& z, int binding) {
    if (binding < 0) return false;
    const auto s = obj.slacks(z);
    const double slack = s[static_cast<std::size_t>(binding)];
    if (binding_is_weight(obj, binding)) return slack < kWeightBoundary;
    return slack < kPointBoundary * obj.model().scale();
}

RunResult newton_run(const ReducedObjective& obj, ZVector z, const SolveOptions& opts) {
    RunResult r;
    const std::size_t np = z.free_points.size();
    double f = safe_log_value(obj, z);
    r.trace.push_back(std::exp(f));
    if (!std::isfinite(f)) {
        r.z = z;
        r.status = RunStatus::stalled;
        return r;
    }
    Vector g;
    int stuck_at = -1;
    int stuck_count = 0;
    for (int it = 0; it < opts.max_iter; ++it) {
        r.iterations = it;
        if (!try_gradient(obj, z, g)) {
            r.status = RunStatus::stalled;
            break;
        }
        r.grad_norm = g.size() ? g.cwiseAbs().maxCoeff() : 0.0;
        if (r.grad_norm <= opts.grad_tol) {
            r.status = RunStatus::converged;
            break;
        }
        const Matrix H = fd_hessian(obj, z);
        const auto eig = linalg::symmetric_eigen(H);
        const double top = eig.values.cwiseAbs().maxCoeff();
        const double floor = std::max(1e-10 * top, 1e-14);
        Vector inv(eig.values.size());
        for (Eigen::Index i = 0; i < inv.size(); ++i) inv(i) = 1.0 / std::max(std::abs(eig.values(i)), floor);
        // H is replaced by -|H|, so the step is an ascent direction.
        const Vector dz = eig.vectors * inv.asDiagonal() * eig.vectors.transpose() * g;
        int binding = -1;
        const double alpha_max = obj.max_step(z, dz, opts.boundary_fraction, binding);
        double alpha = std::min(1.0, alpha_max);
        const double slope = g.dot(dz);
        const Vector z0 = z.to_vector();
        bool accepted = false;
        ZVector trial;
        double ft = neg_inf();
        // Close to a critical point the gain in log Φ̃ drops below its
        // rounding error, so a smaller gradient also qualifies a step.
        const bool local = r.grad_norm <= kLocalGradient;
        const double noise = kValueNoise * std::max(1.0, std::abs(f));
        while (!accepted && alpha > 1e-14) {
            trial = ZVector::from_vector(z0 + alpha * dz, np);
            ft = safe_log_value(obj, trial);
            if (std::isfinite(ft) && ft >= f + opts.armijo * alpha * slope) {
                accepted = true;
                break;
            }
            Vector gt;
            if (local && std::isfinite(ft) && ft >= f - noise && try_gradient(obj, trial, gt) &&
                gt.cwiseAbs().maxCoeff() < r.grad_norm) {
                accepted = true;
                break;
            }
            alpha *= opts.backtrack;
        }
        if (!accepted) {
            r.status = r.grad_norm <= kNoiseGradient ? RunStatus::converged : RunStatus::stalled;
            break;
        }
        const bool truncated = alpha_max < 1.0 && alpha == alpha_max;
        const double moved = (alpha * dz).cwiseAbs().maxCoeff();
        if (r.grad_norm <= kNoiseGradient && moved <= kStepNoise * (1.0 + z0.cwiseAbs().maxCoeff())) {
            z = trial;
            f = ft;
            r.trace.push_back(std::exp(f));
            r.status = RunStatus::converged;
            break;
        }
        z = trial;
        f = ft;
        r.trace.push_back(std::exp(f));
        if (truncated) {
            stuck_count = (binding == stuck_at) ? stuck_count + 1 : 1;
            stuck_at = binding;
            if (at_boundary(obj, z, binding) || stuck_count >= 40) {
                r.binding = binding;
                const auto s = obj.slacks(z);
                const bool cap = !binding_is_weight(obj, binding) && binding >= static_cast<int>(obj.m() - 1) &&
                                 ((binding == static_cast<int>(obj.m() - 1) && !obj.fix_lower() && !obj.region().lower_finite()) ||
                                  (!obj.fix_upper() && !obj.region().upper_finite() &&
                                   binding == static_cast<int>(obj.point_constraint_count() - 1)));
                r.status = cap ? RunStatus::diverged : RunStatus::boundary;
                break;
            }
        } else {
            stuck_count = 0;
            stuck_at = -1;
        }
        r.status = RunStatus::max_iter;
    }
    r.z = z;
    r.value = std::exp(f);
    if (r.status == RunStatus::converged && try_gradient(obj, z, g)) r.grad_norm = g.size() ? g.cwiseAbs().maxCoeff() : 0.0;
    return r;
}

bool lexicographically_less(const Design& a, const Design& b) {
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
        if (a.point(i) != b.point(i)) return a.point(i) < b.point(i);
    }
    return a.size() < b.size();
}

struct Shape {
    std::size_t m;
    bool fix_lower;
    bool fix_upper;
};

// Shape and warm start after a run stopped on a constraint.
std::optional<std::pair<Shape, Design>> fallback_shape(const ReducedObjective& obj, const RunResult& run) {
    std::vector<double> x, w;
    obj.unpack(run.z, x, w);
    for (double& v : w) v = std::max(v, 0.0);
    Shape next{obj.m(), obj.fix_lower(), obj.fix_upper()};
    const auto b = static_cast<std::size_t>(run.binding);
    const std::size_t gaps = obj.m() - 1;
    const auto& region = obj.region();
    if (!binding_is_weight(obj, run.binding) && b >= gaps) {
        // a free point reached an unfixed finite endpoint: adjoin it
        const bool lower = !obj.fix_lower() && b == gaps;
        if (lower) {
            next.fix_lower = true;
            x.front() = region.lower();
        } else {
            next.fix_upper = true;
            x.back() = region.upper();
        }
    } else {
        // a weight vanished or two points merged: drop one support point
        if (obj.m() <= 1) return std::nullopt;
        std::size_t drop;
        if (binding_is_weight(obj, run.binding)) {
            drop = b - obj.point_constraint_count();
        } else {
            drop = w[b] <= w[b + 1] ? b : b + 1;
            w[drop == b ? b + 1 : b] += w[drop];
        }
        if (drop == 0 && obj.fix_lower()) next.fix_lower = false;
        if (drop == x.size() - 1 && obj.fix_upper()) next.fix_upper = false;
        x.erase(x.begin() + static_cast<std::ptrdiff_t>(drop));
        w.erase(w.begin() + static_cast<std::ptrdiff_t>(drop));
        next.m -= 1;
    }
    double total = std::accumulate(w.begin(), w.end(), 0.0);
    if (!(total > 0.0)) return std::nullopt;
    for (double& v : w) v = std::max(v / total, 1e-6);
    total = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& v : w) v /= total;
    return std::make_pair(next, Design(x, w));
}

std::vector<RunResult> run_starts(const ReducedObjective& obj, const SolveOptions& opts, std::size_t starts,
                                  bool include_default) {
    Window win = search_window(obj.model(), obj.region());
    // Shrink toward the finite end until the evenly spread start is nonsingular.
    for (int i = 0; i < 30 && !std::isfinite(safe_log_value(obj, default_start(obj, win))); ++i) {
        const DesignSpace& region = obj.region();
        const double half = 0.5 * (win.hi - win.lo);
        if (region.lower_finite() && !region.upper_finite()) {
            win.hi = win.lo + half;
        } else if (region.upper_finite() && !region.lower_finite()) {
            win.lo = win.hi - half;
        } else if (!region.bounded()) {
            win = {win.lo + 0.5 * half, win.hi - 0.5 * half};
        } else {
            break;
        }
    }
    std::mt19937_64 rng(opts.seed);
    std::vector<RunResult> runs;
    for (std::size_t s = 0; s < starts; ++s) {
        ZVector z;
        std::optional<ZVector> warm;
        if (s == 0 && opts.initial_design) warm = warm_start(obj, *opts.initial_design);
        if (warm) {
            z = *warm;
        } else if (s == 0 && include_default) {
            z = default_start(obj, win);
        } else {
            z = jittered_start(obj, win, rng);
        }
        runs.push_back(newton_run(obj, z, opts));
    }
    return runs;
}

SolveReport solve_shape(const Model& model, const CriterionSpec& crit, const DesignSpace& region, Shape shape,
                        const SolveOptions& opts, int depth);

SolveReport finish(const Model& model, const CriterionSpec& crit, const DesignSpace& region, SolveReport report,
                   const SolveOptions& opts) {
    if (opts.certify && !report.design.empty()) {
        try {
            report.certificate = verify_optimality(model, crit, report.design, region, opts.scan_resolution, opts.sensitivity_tol);
        } catch (const Error& e) {
            report.message += (report.message.empty() ? "" : "; ") + std::string("certificate unavailable: ") + e.what();
        }
    }
    return report;
}

SolveReport c_fallback(const Model& model, const CriterionSpec& crit, const DesignSpace& region, const SolveOptions& opts,
                       SolveReport report) {
    SolveOptions inner = opts;
    inner.initial_design.reset();
    auto ref = c_optimal_reference(model, crit.transform.a, region, inner);
    if (!ref) return report;
    report.design = ref->design;
    report.criterion_value = ref->value;
    report.feasible = false;
    report.boundary_fallback_used = true;
    report.m = ref->design.size();
    report.message = "c-optimal design has fewer than d support points; located by " + ref->method;
    return report;
}

SolveReport solve_shape(const Model& model, const CriterionSpec& crit, const DesignSpace& region, Shape shape,
                        const SolveOptions& opts, int depth) {
    const ReducedObjective obj(model, crit, region, shape.m, shape.fix_lower, shape.fix_upper);
    const auto runs = run_starts(obj, opts, static_cast<std::size_t>(opts.multistart), true);

    SolveReport report;
    report.m = shape.m;
    report.fix_lower = shape.fix_lower;
    report.fix_upper = shape.fix_upper;
    report.starts = runs.size();

    std::vector<const RunResult*> converged;
    for (const auto& r : runs)
        if (r.status == RunStatus::converged) converged.push_back(&r);
    report.starts_converged = converged.size();

    if (!converged.empty()) {
        const RunResult* best = converged.front();
        for (const auto* r : converged)
            if (r->value > best->value) best = r;
        std::vector<Design> designs;
        for (const auto* r : converged) designs.push_back(obj.assemble(r->z));
        double agreement = 0.0;
        for (std::size_t i = 0; i < designs.size(); ++i)
            for (std::size_t j = i + 1; j < designs.size(); ++j) agreement = std::max(agreement, designs[i].distance(designs[j]));
        Design chosen = obj.assemble(best->z);
        const RunResult* chosen_run = best;
        for (std::size_t i = 0; i < converged.size(); ++i) {
            const bool tie = converged[i]->value >= best->value * (1.0 - kTieTolerance);
            if (tie && designs[i].distance(chosen) > kAgreementTolerance) {
                report.non_unique = true;
                if (lexicographically_less(designs[i], chosen)) {
                    chosen = designs[i];
                    chosen_run = converged[i];
                }
            }
        }
        report.design = chosen;
        report.criterion_value = chosen_run->value;
        report.grad_norm = chosen_run->grad_norm;
        report.iterations = chosen_run->iterations;
        report.value_trace = chosen_run->trace;
        report.multistart_agreement = agreement;
        report.feasible = chosen.support_size() == shape.m;
        if (report.grad_norm > opts.grad_tol) {
            std::ostringstream os;
            os << "converged at the gradient noise floor (" << report.grad_norm << ")";
            report.message = os.str();
        }
        return finish(model, crit, region, report, opts);
    }

    // No interior critical point: follow the run that ended on a constraint.
    const RunResult* best = nullptr;
    for (const auto& r : runs) {
        if (r.status == RunStatus::boundary && (!best || r.value > best->value)) best = &r;
    }
    if (best && depth < kMaxFallbacks) {
        auto next = fallback_shape(obj, *best);
        if (next) {
            const auto& [sh, start] = *next;
            if (crit.is_c_optimality() && sh.m < model.dim()) {
                SolveReport partial;
                partial.starts = runs.size();
                return finish(model, crit, region, c_fallback(model, crit, region, opts, partial), opts);
            }
            SolveOptions inner = opts;
            inner.initial_design = start;
            SolveReport sub = solve_shape(model, crit, region, sh, inner, depth + 1);
            sub.boundary_fallback_used = true;
            if (sh.m < shape.m) sub.feasible = false;
            sub.starts = runs.size();
            return sub;
        }
    }

    const RunResult* any = &runs.front();
    for (const auto& r : runs)
        if (r.value > any->value) any = &r;
    report.design = obj.assemble(any->z);
    report.criterion_value = any->value;
    report.grad_norm = any->grad_norm;
    report.iterations = any->iterations;
    report.value_trace = any->trace;
    report.feasible = false;
    report.message = any->status == RunStatus::diverged ? "iterates reached the hard cap on |x|" : "no start converged";
    return finish(model, crit, region, report, opts);
}

CriterionSpec prepared(const CriterionSpec& crit, const Model& model, const DesignSpace& region, const SolveOptions& opts) {
    crit.validate(model.dim());
    if (crit.kind == CriterionSpec::Kind::compound && !crit.references_resolved()) {
        return resolve_references(crit, model, region, opts);
    }
    return crit;
}

} // namespace

SolveReport newton_solve_shape(const Model& model, const CriterionSpec& crit, const DesignSpace& region, std::size_t m,
                               bool fix_lower, bool fix_upper, const SolveOptions& opts) {
    opts.validate();
    if (!model.natural_space().contains(region)) {
        throw DesignSpaceError("region " + region.to_string() + " exceeds the model's design space");
    }
    const CriterionSpec c = prepared(crit, model, region, opts);
    return solve_shape(model, c, region, Shape{m, fix_lower, fix_upper}, opts, 0);
}

SolveReport newton_solve(const Model& model, const CriterionSpec& crit, const DesignSpace& region, const SolveOptions& opts) {
    opts.validate();
    const ClassDescriptor desc = classify(model, region);
    const CriterionSpec c = prepared(crit, model, region, opts);
    return solve_shape(model, c, region, Shape{desc.m, desc.fix_lower, desc.fix_upper}, opts, 0);
}

SolveReport restrict_region(const SolveReport& full, const DesignSpace& region, const Model& model,
                            const CriterionSpec& crit, const SolveOptions& opts) {
    if (!full.feasible) throw Error("restrict_region needs a feasible full-region report");
    const auto pts = full.design.points();
    const bool below = !region.contains(pts.front()) && pts.front() < region.lower();
    const bool above = !region.contains(pts.back()) && pts.back() > region.upper();
    bool fits = true;
    for (double x : pts) fits = fits && region.contains(x);
    if (fits) return full;

    const ClassDescriptor desc = classify(model, region);
    Shape shape{desc.m, desc.fix_lower, desc.fix_upper};
    switch (desc.which) {
    case ClassDescriptor::Case::a:
    case ClassDescriptor::Case::b:
        shape.fix_lower = true;
        shape.fix_upper = true;
        break;
    case ClassDescriptor::Case::c:
        shape.fix_lower = shape.fix_lower || below;
        shape.fix_upper = shape.fix_upper || above;
        break;
    case ClassDescriptor::Case::d: break;
    }
    SolveOptions inner = opts;
    inner.initial_design.reset();
    SolveReport r = newton_solve_shape(model, crit, region, shape.m, shape.fix_lower, shape.fix_upper, inner);
    r.boundary_fallback_used = true;
    return r;
}

EquivalenceCertificate verify_optimality(const Model& model, const CriterionSpec& crit, const Design& design,
                                         const DesignSpace& region, std::size_t scan_resolution, double relative_tol) {
    const CriterionSpec c = crit.kind == CriterionSpec::Kind::compound && !crit.references_resolved()
                                ? resolve_references(crit, model, region)
                                : crit;
    const Matrix M = info_matrix(model, design, region);
    const double phi = phi_value(c, M);
    const Matrix G = phi_gradient(c, M);
    const double base = linalg::inner(G, M);
    auto psi = [&](double x) { return linalg::inner(G, model.unit_info(x)) - base; };

    // t ∈ [0, 1] maps onto the region; infinite ends are compactified.
    const double s = model.scale();
    const double lo = region.lower();
    const double hi = region.upper();
    const double mid = model.center();
    auto to_x = [&](double t) {
        if (region.bounded()) return lo + (hi - lo) * t;
        if (region.lower_finite()) return lo + s * t / (1.0 - t);
        if (region.upper_finite()) return hi - s * (1.0 - t) / t;
        return mid + s * std::tan(std::numbers::pi * (t - 0.5));
    };
    const double t_lo = region.lower_finite() ? 0.0 : 1e-9;
    const double t_hi = region.upper_finite() ? 1.0 : 1.0 - 1e-9;

    const std::size_t n = std::max<std::size_t>(scan_resolution, 3);
    std::vector<double> ts(n), vals(n);
    for (std::size_t i = 0; i < n; ++i) {
        ts[i] = t_lo + (t_hi - t_lo) * static_cast<double>(i) / static_cast<double>(n - 1);
        vals[i] = psi(to_x(ts[i]));
    }
    EquivalenceCertificate cert;
    cert.scan_points = n;
    std::size_t arg = static_cast<std::size_t>(std::max_element(vals.begin(), vals.end()) - vals.begin());
    cert.max_sensitivity = vals[arg];
    cert.argmax = to_x(ts[arg]);

    std::vector<std::size_t> peaks;
    for (std::size_t i = 0; i < n; ++i) {
        const bool left = i == 0 || vals[i] >= vals[i - 1];
        const bool right = i + 1 == n || vals[i] >= vals[i + 1];
        if (left && right) peaks.push_back(i);
    }
    std::sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) { return vals[a] > vals[b]; });
    if (peaks.size() > 5) peaks.resize(5);
    const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
    for (std::size_t pk : peaks) {
        double a = ts[pk == 0 ? 0 : pk - 1];
        double b = ts[pk + 1 == n ? n - 1 : pk + 1];
        double c1 = b - golden * (b - a);
        double c2 = a + golden * (b - a);
        double f1 = psi(to_x(c1));
        double f2 = psi(to_x(c2));
        for (int it = 0; it < 60 && b - a > 1e-15; ++it) {
            if (f1 < f2) {
                a = c1;
                c1 = c2;
                f1 = f2;
                c2 = a + golden * (b - a);
                f2 = psi(to_x(c2));
            } else {
                b = c2;
                c2 = c1;
                f2 = f1;
                c1 = b - golden * (b - a);
                f1 = psi(to_x(c1));
            }
        }
        const double t = f1 > f2 ? c1 : c2;
        const double v = std::max(f1, f2);
        cert.scan_points += 60;
        if (v > cert.max_sensitivity) {
            cert.max_sensitivity = v;
            cert.argmax = to_x(t);
        }
    }
    for (std::size_t i = 0; i < design.size(); ++i) {
        const double v = psi(design.point(i));
        if (design.weight(i) > 0.0) cert.support_residual = std::max(cert.support_residual, std::abs(v));
        if (v > cert.max_sensitivity) {
            cert.max_sensitivity = v;
            cert.argmax = design.point(i);
        }
    }
    cert.max_sensitivity_violation = std::max(0.0, cert.max_sensitivity);
    cert.tolerance = relative_tol * phi;
    cert.passed = cert.max_sensitivity <= cert.tolerance && cert.support_residual <= cert.tolerance;
    return cert;
}

UniquenessReport uniqueness_probe(const Model& model, const CriterionSpec& crit, const DesignSpace& region,
                                  std::size_t starts, const SolveOptions& opts) {
    opts.validate();
    if (starts == 0) throw Error("uniqueness probe needs at least one start");
    const ClassDescriptor desc = classify(model, region);
    const CriterionSpec c = prepared(crit, model, region, opts);
    const ReducedObjective obj(model, c, region, desc.m, desc.fix_lower, desc.fix_upper);
    SolveOptions inner = opts;
    inner.initial_design.reset();
    const auto runs = run_starts(obj, inner, starts, true);
    UniquenessReport report;
    report.starts = starts;
    for (const auto& r : runs) {
        if (r.status == RunStatus::converged) report.designs.push_back(obj.assemble(r.z));
    }
    report.converged = report.designs.size();
    for (std::size_t i = 0; i < report.designs.size(); ++i)
        for (std::size_t j = i + 1; j < report.designs.size(); ++j)
            report.agreement = std::max(report.agreement, report.designs[i].distance(report.designs[j]));
    return report;
}

namespace {

// Elfving candidates with d-1 support points: fixed endpoints plus one free
// interior point placed where a enters span{√w f(x_j)}.
std::optional<CReference> elfving_reference(const Model& model, const Vector& a, const DesignSpace& region) {
    if (!region.bounded()) return std::nullopt;
    const auto d = static_cast<Eigen::Index>(model.dim());
    const double L = region.lower();
    const double U = region.upper();
    auto ftilde = [&](double x) -> Vector { return std::sqrt(model.weight(x)) * model.gradient(x); };
    auto ftilde_dx = [&](double x) -> Vector {
        const double w = model.weight(x);
        return std::sqrt(w) * model.gradient_dx(x) + 0.5 * model.weight_dx(x) / std::sqrt(w) * model.gradient(x);
    };
    std::vector<std::vector<double>> endpoint_sets;
    if (d - 2 == 0) endpoint_sets = {{}};
    if (d - 2 == 1) endpoint_sets = {{L}, {U}};
    if (d - 2 == 2) endpoint_sets = {{L, U}};
    std::optional<CReference> best;
    const CriterionSpec crit = CriterionSpec::c(a);
    for (const auto& ends : endpoint_sets) {
        auto det_at = [&](double x) {
            std::vector<double> pts = ends;
            pts.push_back(x);
            std::sort(pts.begin(), pts.end());
            Matrix A(d, d);
            for (Eigen::Index j = 0; j < d - 1; ++j) A.col(j) = ftilde(pts[static_cast<std::size_t>(j)]);
            A.col(d - 1) = a;
            return A.determinant();
        };
        const int grid = 4000;
        double prev_x = L + (U - L) * 1e-6;
        double prev = det_at(prev_x);
        for (int i = 1; i <= grid; ++i) {
            const double x = L + (U - L) * (static_cast<double>(i) / grid) * (1.0 - 2e-6) + (U - L) * 1e-6;
            const double cur = det_at(x);
            if (prev == 0.0 || cur == 0.0 || (prev < 0.0) != (cur < 0.0)) {
                double lo = prev_x, hi = x, flo = prev;
                for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(hi)); ++it) {
                    const double midx = 0.5 * (lo + hi);
                    const double fm = det_at(midx);
                    if ((fm < 0.0) == (flo < 0.0) && fm != 0.0) {
                        lo = midx;
                        flo = fm;
                    } else {
                        hi = midx;
                    }
                }
                const double root = 0.5 * (lo + hi);
                std::vector<double> pts = ends;
                pts.push_back(root);
                std::sort(pts.begin(), pts.end());
                Matrix F(d, d - 1);
                for (Eigen::Index j = 0; j < d - 1; ++j) F.col(j) = ftilde(pts[static_cast<std::size_t>(j)]);
                const Vector coef = F.colPivHouseholderQr().solve(a);
                if ((F * coef - a).norm() > 1e-8 * a.norm()) continue;
                const double total = coef.cwiseAbs().sum();
                std::vector<double> w(pts.size());
                for (std::size_t j = 0; j < pts.size(); ++j) w[j] = std::abs(coef(static_cast<Eigen::Index>(j))) / total;
                // Dual certificate h: f̃(x_j)ᵀh = sign(c_j) at support,
                // (f̃ᵀh)'(root) = 0 at the interior support point.
                Matrix S(d, d);
                Vector rhs(d);
                for (Eigen::Index j = 0; j < d - 1; ++j) {
                    S.row(j) = ftilde(pts[static_cast<std::size_t>(j)]).transpose();
                    rhs(j) = coef(j) >= 0.0 ? 1.0 : -1.0;
                }
                S.row(d - 1) = ftilde_dx(root).transpose();
                rhs(d - 1) = 0.0;
                const Vector h = S.fullPivLu().solve(rhs);
                double worst = 0.0;
                for (int k = 0; k <= 20000; ++k) {
                    const double x = L + (U - L) * k / 20000.0;
                    worst = std::max(worst, std::abs(ftilde(x).dot(h)));
                }
                if (worst > 1.0 + 1e-6) continue;
                Design design(pts, w);
                const double value = phi_value(crit, info_matrix(model, design, region));
                if (!best || value > best->value) best = CReference{design, value, "elfving"};
            }
            prev_x = x;
            prev = cur;
        }
    }
    return best;
}

} // namespace

std::optional<CReference> c_optimal_reference(const Model& model, const Vector& a, const DesignSpace& region,
                                              const SolveOptions& opts) {
    const CriterionSpec crit = CriterionSpec::c(a);
    crit.validate(model.dim());
    const ChebyshevReport est = check_estimability(model, a, region, 2000, opts.seed);
    if (!est.violated) {
        SolveOptions inner = opts;
        inner.initial_design.reset();
        const ClassDescriptor desc = classify(model, region);
        const SolveReport r = solve_shape(model, crit, region, Shape{desc.m, desc.fix_lower, desc.fix_upper}, inner, kMaxFallbacks);
        if (r.feasible && r.certificate.passed) return CReference{r.design, r.criterion_value, "direct"};
    }
    return elfving_reference(model, a, region);
}

EpsilonReport epsilon_c_solve(const Model& model, const Vector& a, double p, const DesignSpace& region,
                              const SolveOptions& opts) {
    opts.validate();
    if (!(p <= -1.0)) throw CriterionError("epsilon sequence needs p <= -1");
    const CriterionSpec c_crit = CriterionSpec::c(a);
    c_crit.validate(model.dim());
    EpsilonReport report;
    SolveOptions inner = opts;
    for (double eps : opts.epsilon_schedule) {
        const CriterionSpec crit = CriterionSpec::phi_p(p, TransformSpec::epsilon_augmented(a, eps));
        EpsilonStep step;
        step.epsilon = eps;
        try {
            step.report = newton_solve(model, crit, region, inner);
        } catch (const Error& e) {
            report.truncated = true;
            report.message = std::string("solve failed at epsilon ") + std::to_string(eps) + ": " + e.what();
            break;
        }
        if (step.report.design.empty()) {
            report.truncated = true;
            report.message = "solve returned no design at epsilon " + std::to_string(eps);
            break;
        }
        step.c_value = phi_value(c_crit, info_matrix(model, step.report.design, region));
        inner.initial_design = step.report.design;
        report.steps.push_back(std::move(step));
    }
    if (report.steps.empty()) return report;

    auto ref = c_optimal_reference(model, a, region, opts);
    const auto best_step = std::max_element(report.steps.begin(), report.steps.end(),
                                            [](const EpsilonStep& x, const EpsilonStep& y) { return x.c_value < y.c_value; });
    if (ref && ref->value >= best_step->c_value * (1.0 - 1e-12)) {
        report.reference = ref->design;
        report.reference_value = ref->value;
        report.reference_method = ref->method;
    } else {
        report.reference = best_step->report.design;
        report.reference_value = best_step->c_value;
        report.reference_method = "last-epsilon";
    }
    report.monotone = true;
    for (std::size_t i = 0; i < report.steps.size(); ++i) {
        auto& s = report.steps[i];
        s.c_efficiency = s.c_value / report.reference_value;
        if (i > 0 && s.c_efficiency < report.steps[i - 1].c_efficiency - 1e-9) report.monotone = false;
    }
    report.limit = report.steps.back().report.design.pruned(1e-3);
    return report;
}

CriterionSpec resolve_references(const CriterionSpec& crit, const Model& model, const DesignSpace& region,
                                 const SolveOptions& opts, ReferenceCache* cache) {
    if (crit.kind != CriterionSpec::Kind::compound) return crit;
    crit.validate(model.dim());
    CriterionSpec out = crit;
    auto& c = *out.compound;
    c.reference_values.assign(c.beta.size(), 0.0);
    const auto lambda = model.efficiency_function();
    const std::string tag = model.name() + (lambda ? "|" + lambda->label() : "");
    SolveOptions inner = opts;
    inner.initial_design.reset();
    inner.certify = false;
    for (std::size_t l = 0; l < c.beta.size(); ++l) {
        const auto nested = model.nested(l + 2);
        ReferenceCache::Key key{tag, l + 1, region.lower(), region.upper(),
                                std::vector<double>(nested->theta().data(), nested->theta().data() + nested->theta().size()),
                                c.inner_p};
        if (cache) {
            if (auto hit = cache->find(key)) {
                c.reference_values[l] = *hit;
                continue;
            }
        }
        const SolveReport r = newton_solve(*nested, CriterionSpec::phi_p(c.inner_p), region, inner);
        if (!(r.criterion_value > 0.0)) {
            throw ConvergenceError("nested reference solve failed for degree " + std::to_string(l + 1));
        }
        c.reference_values[l] = r.criterion_value;
        if (cache) cache->insert(key, r.criterion_value);
    }
    return out;
}

} // namespace satdesign
