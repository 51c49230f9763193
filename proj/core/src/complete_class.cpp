#include "satdesign/complete_class.hpp"

#include "satdesign/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace satdesign {

namespace {

constexpr double kNearZero = 1e-10;
constexpr double kWindowScales = 10.0;
constexpr double kRatioTolerance = 1e-12;

using Psi = std::function<double(double)>;

ClassDescriptor base(ClassDescriptor::Case which, std::size_t m, const DesignSpace& region, const Model& model) {
    ClassDescriptor d;
    d.which = which;
    d.m = m;
    d.region = region;
    d.scale = model.scale();
    switch (which) {
    case ClassDescriptor::Case::a:
    case ClassDescriptor::Case::b: d.k = 2 * m - 1; break;
    case ClassDescriptor::Case::c: d.k = 2 * m; break;
    case ClassDescriptor::Case::d: d.k = 2 * m - 2; break;
    }
    return d;
}

// Resolves the c-scale fixed set {A} / {B} / ∅ / {A, B} to x-scale endpoints.
void resolve_fix(ClassDescriptor& d) {
    const bool inc = d.c_transform.increasing;
    switch (d.which) {
    case ClassDescriptor::Case::a:
        d.fix_lower = inc;
        d.fix_upper = !inc;
        break;
    case ClassDescriptor::Case::b:
        d.fix_lower = !inc;
        d.fix_upper = inc;
        break;
    case ClassDescriptor::Case::c: break;
    case ClassDescriptor::Case::d:
        d.fix_lower = true;
        d.fix_upper = true;
        break;
    }
    if (d.fix_lower) d.region.finite_lower();
    if (d.fix_upper) d.region.finite_upper();
}

CTransform saturating(double theta, std::string label) {
    CTransform t;
    t.forward = [theta](double x) { return std::isinf(x) ? (x > 0 ? 1.0 : -kInfinity) : x / (x + theta); };
    t.inverse = [theta](double c) { return c >= 1.0 ? kInfinity : theta * c / (1.0 - c); };
    t.increasing = true;
    t.label = std::move(label);
    return t;
}

std::vector<Psi> polynomial_psi(std::size_t count) {
    std::vector<Psi> psi;
    for (std::size_t j = 0; j < count; ++j) {
        psi.push_back([j](double c) { return std::pow(c, static_cast<double>(j)); });
    }
    return psi;
}

std::vector<std::string> polynomial_labels(std::size_t count) {
    std::vector<std::string> out{"1"};
    for (std::size_t j = 1; j < count; ++j) out.push_back(j == 1 ? "c" : "c^" + std::to_string(j));
    return out;
}

ClassDescriptor classify_polynomial(const Model& model, const DesignSpace& region) {
    const auto lambda = *model.efficiency_function();
    const std::size_t d = model.dim();
    using Kind = EfficiencyFunction::Kind;
    ClassDescriptor desc;
    switch (lambda.kind) {
    case Kind::constant: {
        desc = base(ClassDescriptor::Case::d, d, region, model);
        desc.psi = polynomial_psi(desc.k);
        desc.psi_labels = polynomial_labels(desc.k);
        break;
    }
    case Kind::one_minus_x:
    case Kind::exp_neg_x:
    case Kind::one_plus_x: {
        desc = base(lambda.kind == Kind::one_plus_x ? ClassDescriptor::Case::b : ClassDescriptor::Case::a, d, region, model);
        desc.psi.push_back([](double) { return 1.0; });
        desc.psi_labels.push_back("1");
        for (std::size_t j = 0; j + 1 < desc.k; ++j) {
            desc.psi.push_back([lambda, j](double c) { return lambda(c) * std::pow(c, static_cast<double>(j)); });
            desc.psi_labels.push_back(j == 0 ? "lambda" : "lambda*c^" + std::to_string(j));
        }
        break;
    }
    case Kind::cauchy:
        if (static_cast<double>(d) > lambda.t) {
            throw NoCompleteClassError("polynomial with (1+x^2)^-t efficiency needs d <= t");
        }
        [[fallthrough]];
    case Kind::jacobi:
    case Kind::laguerre:
    case Kind::gauss:
        desc = base(ClassDescriptor::Case::c, d, region, model);
        desc.note = "Psi system not registered";
        break;
    }
    desc.note = desc.note.empty() ? "efficiency " + lambda.label() : desc.note + "; efficiency " + lambda.label();
    return desc;
}

double window_lower(const DesignSpace& region, double scale) {
    if (region.lower_finite()) return region.lower();
    return region.upper_finite() ? region.upper() - kWindowScales * scale : -kWindowScales * scale;
}

double window_upper(const DesignSpace& region, double scale) {
    if (region.upper_finite()) return region.upper();
    return region.lower_finite() ? region.lower() + kWindowScales * scale : kWindowScales * scale;
}

// Increasing k-tuples: alternately stratified and plain sorted-uniform, with
// each finite end pinned to the boundary with probability 1/2.
class TupleSampler {
public:
    TupleSampler(double lo, double hi, bool pin_lo, bool pin_hi, std::size_t k, std::uint64_t seed)
        : lo_(lo), hi_(hi), pin_lo_(pin_lo), pin_hi_(pin_hi), k_(k), rng_(seed) {}

    std::vector<double> next(std::size_t index) {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const double width = hi_ - lo_;
        for (;;) {
            std::vector<double> t(k_);
            if (index % 2 == 0) {
                for (std::size_t j = 0; j < k_; ++j) t[j] = lo_ + width * (static_cast<double>(j) + unit(rng_)) / static_cast<double>(k_);
            } else {
                for (auto& v : t) v = lo_ + width * unit(rng_);
                std::sort(t.begin(), t.end());
            }
            if (pin_lo_ && unit(rng_) < 0.5) t.front() = lo_;
            if (pin_hi_ && k_ > 1 && unit(rng_) < 0.5) t.back() = hi_;
            bool ok = true;
            for (std::size_t j = 1; j < k_; ++j) ok = ok && (t[j] - t[j - 1]) > 1e-9 * width;
            if (ok) return t;
        }
    }

private:
    double lo_, hi_;
    bool pin_lo_, pin_hi_;
    std::size_t k_;
    std::mt19937_64 rng_;
};

// Determinant of the row-equilibrated matrix divided by the tuple's
// normalized Vandermonde product. Returns {raw det, normalized det}.
std::pair<double, double> normalized_det(const Matrix& A, const std::vector<double>& tuple, double width) {
    const double raw = A.determinant();
    Matrix B = A;
    for (Eigen::Index r = 0; r < B.rows(); ++r) {
        const double n = B.row(r).norm();
        if (n == 0.0) return {raw, 0.0};
        B.row(r) /= n;
    }
    double vandermonde = 1.0;
    for (std::size_t i = 0; i < tuple.size(); ++i)
        for (std::size_t j = i + 1; j < tuple.size(); ++j) vandermonde *= (tuple[j] - tuple[i]) / width;
    return {raw, B.determinant() / vandermonde};
}

class SignTracker {
public:
    explicit SignTracker(ChebyshevReport& report) : report_(report) {
        report_.min_abs_determinant = kInfinity;
        report_.min_normalized_determinant = kInfinity;
    }

    // Returns false once a violation is recorded.
    bool add(double raw, double normalized, const std::vector<double>& witness) {
        ++report_.tuples_tested;
        report_.min_abs_determinant = std::min(report_.min_abs_determinant, std::abs(raw));
        report_.min_normalized_determinant = std::min(report_.min_normalized_determinant, std::abs(normalized));
        if (!(std::abs(normalized) >= kNearZero)) {
            flag(witness, "near-zero determinant");
            return false;
        }
        const int s = normalized > 0 ? 1 : -1;
        if (sign_ == 0) sign_ = s;
        if (s != sign_) {
            flag(witness, "determinant changes sign");
            return false;
        }
        return true;
    }

private:
    void flag(const std::vector<double>& witness, std::string reason) {
        report_.violated = true;
        report_.witness = witness;
        report_.reason = std::move(reason);
    }

    ChebyshevReport& report_;
    int sign_ = 0;
};

ChebyshevReport run_system(const std::vector<Psi>& system, const std::function<double(double)>& to_c, double lo, double hi,
                           bool pin_lo, bool pin_hi, std::size_t samples, std::uint64_t seed) {
    ChebyshevReport report;
    report.system_size = system.size();
    const std::size_t k = system.size();
    if (k == 0) {
        report.reason = "empty system";
        return report;
    }
    TupleSampler sampler(lo, hi, pin_lo, pin_hi, k, seed);
    SignTracker tracker(report);
    Matrix A(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    for (std::size_t s = 0; s < samples; ++s) {
        const auto tuple = sampler.next(s);
        std::vector<double> cs(k);
        for (std::size_t j = 0; j < k; ++j) cs[j] = to_c(tuple[j]);
        for (std::size_t l = 0; l < k; ++l)
            for (std::size_t j = 0; j < k; ++j) A(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(j)) = system[l](cs[j]);
        const auto [raw, normalized] = normalized_det(A, tuple, hi - lo);
        if (!tracker.add(raw, normalized, tuple)) break;
    }
    return report;
}

} // namespace

CTransform CTransform::identity() {
    CTransform t;
    t.forward = [](double x) { return x; };
    t.inverse = [](double c) { return c; };
    return t;
}

CTransform CTransform::affine(double slope, double offset, std::string label) {
    if (slope == 0.0) throw Error("c-transform slope must be nonzero");
    CTransform t;
    t.forward = [slope, offset](double x) { return slope * x + offset; };
    t.inverse = [slope, offset](double c) { return (c - offset) / slope; };
    t.increasing = slope > 0.0;
    t.label = std::move(label);
    return t;
}

double ClassDescriptor::c_lower() const {
    return c_transform.increasing ? c_transform.forward(region.lower()) : c_transform.forward(region.upper());
}

double ClassDescriptor::c_upper() const {
    return c_transform.increasing ? c_transform.forward(region.upper()) : c_transform.forward(region.lower());
}

double ClassDescriptor::psi_at(std::size_t ell, double x) const {
    return psi.at(ell)(c_transform.forward(x));
}

std::string to_string(ClassDescriptor::Case which) {
    switch (which) {
    case ClassDescriptor::Case::a: return "a";
    case ClassDescriptor::Case::b: return "b";
    case ClassDescriptor::Case::c: return "c";
    case ClassDescriptor::Case::d: return "d";
    }
    return "?";
}

ClassDescriptor classify(const Model& model, const DesignSpace& region) {
    if (!model.natural_space().contains(region)) {
        throw DesignSpaceError("region " + region.to_string() + " exceeds the model's design space " +
                               model.natural_space().to_string());
    }
    const Vector& t = model.theta();
    using Case = ClassDescriptor::Case;
    ClassDescriptor desc;
    switch (model.kind()) {
    case ModelKind::poisson: {
        const double t2 = t(1);
        desc = base(t2 < 0.0 ? Case::a : Case::b, 2, region, model);
        desc.psi = {[](double) { return 1.0; }, [t2](double c) { return std::exp(t2 * c); },
                    [t2](double c) { return c * std::exp(t2 * c); }};
        desc.psi_labels = {"1", "exp(theta2 c)", "c exp(theta2 c)"};
        break;
    }
    case ModelKind::logistic:
    case ModelKind::probit:
        desc = base(Case::c, 2, region, model);
        desc.note = "two-point class without fixed points from external two-parameter results";
        break;
    case ModelKind::michaelis_menten: {
        desc = base(Case::b, 2, region, model);
        desc.c_transform = saturating(t(1), "c = x/(theta2+x)");
        desc.psi = {[](double) { return 1.0; }, [](double c) { return c * c; }, [](double c) { return c * c * c; }};
        desc.psi_labels = {"1", "c^2", "c^3"};
        desc.note = "two-point class including U from external two-parameter results";
        break;
    }
    case ModelKind::emax:
        desc = base(Case::d, 3, region, model);
        desc.c_transform = saturating(t(2), "c = x/(x+theta3)");
        desc.psi = polynomial_psi(desc.k);
        desc.psi_labels = polynomial_labels(desc.k);
        break;
    case ModelKind::log_linear:
        desc = base(Case::d, 3, region, model);
        desc.note = "Psi system not registered";
        break;
    case ModelKind::linexp: {
        desc = base(Case::d, 4, region, model);
        desc.c_transform = CTransform::affine(t(2), 0.0, "c = theta3 x");
        desc.psi = {[](double) { return 1.0; },
                    [](double c) { return c; },
                    [](double c) { return std::exp(c); },
                    [](double c) { return c * std::exp(c); },
                    [](double c) { return std::exp(2.0 * c); },
                    [](double c) { return c * std::exp(2.0 * c); }};
        desc.psi_labels = {"1", "c", "e^c", "c e^c", "e^{2c}", "c e^{2c}"};
        Matrix P = Matrix::Zero(4, 4);
        P(0, 0) = 1.0;
        P(1, 1) = 1.0;
        P(2, 3) = t(1) / t(2);
        P(3, 2) = 1.0 / t(2);
        desc.P = P;
        break;
    }
    case ModelKind::double_exponential:
        desc = base(Case::d, 4, region, model);
        desc.note = "Psi system not registered";
        break;
    case ModelKind::exponential: {
        const auto S = static_cast<std::size_t>(t.size() / 2);
        if (S == 2) {
            const double ratio = t(3) / t(1);
            if (!(ratio < 61.98)) {
                std::ostringstream os;
                os << "exponential S=2 needs theta4/theta2 < 61.98, got " << ratio;
                throw NoCompleteClassError(os.str());
            }
        } else if (S == 3) {
            const double ratio = t(3) / t(1);
            if (std::abs(2.0 * t(3) - (t(1) + t(5))) > kRatioTolerance * std::abs(2.0 * t(3))) {
                throw NoCompleteClassError("exponential S=3 needs 2 theta4 = theta2 + theta6");
            }
            if (!(ratio < 23.72)) {
                std::ostringstream os;
                os << "exponential S=3 needs theta4/theta2 < 23.72, got " << ratio;
                throw NoCompleteClassError(os.str());
            }
        } else {
            throw NoCompleteClassError("exponential regression has a registered complete class only for S = 2 or 3");
        }
        desc = base(Case::b, 2 * S, region, model);
        desc.c_transform = CTransform::affine(-1.0, 0.0, "c = -x");
        desc.note = "Psi system not registered";
        break;
    }
    case ModelKind::polynomial:
        desc = classify_polynomial(model, region);
        break;
    }
    resolve_fix(desc);
    return desc;
}

ChebyshevReport verify_psi_chebyshev(const ClassDescriptor& desc, std::size_t samples, std::uint64_t seed) {
    if (!desc.has_psi()) {
        ChebyshevReport r;
        r.reason = "Psi system not registered";
        return r;
    }
    const double lo = window_lower(desc.region, desc.scale);
    const double hi = window_upper(desc.region, desc.scale);
    return run_system(desc.psi, desc.c_transform.forward, lo, hi, desc.region.lower_finite(), desc.region.upper_finite(),
                      samples, seed);
}

ChebyshevReport verify_chebyshev_system(const std::vector<std::function<double(double)>>& system, double lower,
                                        double upper, std::size_t samples, std::uint64_t seed) {
    if (!(std::isfinite(lower) && std::isfinite(upper) && lower < upper)) {
        throw DesignSpaceError("Chebyshev check needs a finite interval");
    }
    return run_system(system, [](double c) { return c; }, lower, upper, true, true, samples, seed);
}

Matrix fc_matrix_linexp(double c) {
    Matrix F(2, 2);
    const double e = std::exp(c);
    F << 8.0, 2.0 * e, 2.0 * e, 8.0 * e * e;
    return F;
}

ChebyshevReport check_estimability(const Model& model, const Vector& a, const DesignSpace& region, std::size_t samples,
                                   std::uint64_t seed) {
    const auto d = static_cast<Eigen::Index>(model.dim());
    if (a.size() != d) throw CriterionError("c-vector a must have d entries");
    if (a.isZero(0.0)) throw CriterionError("c-vector a must be nonzero");
    ChebyshevReport report;
    report.system_size = static_cast<std::size_t>(d);
    const double lo = window_lower(region, model.scale());
    const double hi = window_upper(region, model.scale());
    const std::size_t k = static_cast<std::size_t>(d - 1);
    TupleSampler sampler(lo, hi, region.lower_finite(), region.upper_finite(), k, seed);
    SignTracker tracker(report);
    Matrix A(d, d);
    A.col(d - 1) = a;
    for (std::size_t s = 0; s < samples; ++s) {
        const auto tuple = sampler.next(s);
        for (std::size_t j = 0; j < k; ++j) A.col(static_cast<Eigen::Index>(j)) = model.gradient(tuple[j]);
        const auto [raw, normalized] = normalized_det(A, tuple, hi - lo);
        if (!tracker.add(raw, normalized, tuple)) break;
    }
    return report;
}

} // namespace satdesign
