#include "satdesign/criteria.hpp"

#include "satdesign/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>

namespace satdesign {

namespace {

constexpr double kMinP = -50.0;
constexpr double kPdCutoff = 1e-12;
constexpr double kRangeTolerance = 1e-8;

struct Solved {
    Matrix W;   // M⁻¹K (or M⁺K)
    Matrix N;   // KᵀM⁻¹K
};

// M⁻¹K through a diagonally equilibrated Cholesky factorization.
Matrix solve_pd(const Matrix& M, const Matrix& K) {
    const Vector s = M.diagonal().cwiseMax(0.0).cwiseSqrt().unaryExpr([](double v) { return v > 0.0 ? 1.0 / v : 1.0; });
    const Matrix scaled = s.asDiagonal() * linalg::symmetrize(M) * s.asDiagonal();
    Eigen::LDLT<Matrix> ldlt(scaled);
    return s.asDiagonal() * ldlt.solve(s.asDiagonal() * K);
}

// log det of a positive definite matrix through the equilibrated factorization.
std::optional<double> log_det_pd(const Matrix& M) {
    const Vector s = M.diagonal().cwiseMax(0.0).cwiseSqrt().unaryExpr([](double v) { return v > 0.0 ? 1.0 / v : 1.0; });
    Eigen::LDLT<Matrix> ldlt(s.asDiagonal() * linalg::symmetrize(M) * s.asDiagonal());
    if (ldlt.info() != Eigen::Success) return std::nullopt;
    const Vector D = ldlt.vectorD();
    if (!(D.minCoeff() > 0.0)) return std::nullopt;
    return D.array().log().sum() - 2.0 * s.array().log().sum();
}

bool in_range(const Matrix& M, const Matrix& pinv, const Matrix& K) {
    const Matrix residual = K - M * (pinv * K);
    const double scale = std::max(K.norm(), 1e-300);
    return residual.norm() <= kRangeTolerance * scale;
}

// Φ_p of I = N⁻¹ from the eigenvalues of N; 0 when N is not positive.
double value_from_n(const Matrix& N, double p) {
    const auto eig = linalg::symmetric_eigen(N);
    const Vector& mu = eig.values;
    const double v = static_cast<double>(mu.size());
    if (!(mu(0) > 0.0)) return 0.0;
    if (p == 0.0) {
        double logs = 0.0;
        for (Eigen::Index i = 0; i < mu.size(); ++i) logs += std::log(mu(i));
        return std::exp(-logs / v);
    }
    const double s = p < 0.0 ? mu(mu.size() - 1) : mu(0);
    double mean = 0.0;
    for (Eigen::Index i = 0; i < mu.size(); ++i) mean += std::pow(mu(i) / s, -p);
    mean /= v;
    return std::pow(mean, 1.0 / p) / s;
}

double effective_p(const CriterionSpec& crit) {
    return crit.transform.kind == TransformSpec::Kind::c_vector ? -1.0 : crit.p;
}

double phi_p_value(double p, const TransformSpec& transform, const Matrix& M) {
    const auto d = static_cast<std::size_t>(M.rows());
    const Matrix K = transform.matrix_for(d);
    if (linalg::is_positive_definite(M, kPdCutoff)) {
        // D on the full parameter: det M directly, which keeps the small
        // eigenvalues of badly scaled matrices accurate.
        if (p == 0.0 && transform.kind == TransformSpec::Kind::identity) {
            if (const auto ld = log_det_pd(M)) return std::exp(*ld / static_cast<double>(d));
        }
        const Matrix W = solve_pd(M, K);
        return value_from_n(linalg::symmetrize(K.transpose() * W), p);
    }
    const Matrix pinv = linalg::pseudo_inverse(M, kPdCutoff);
    if (!in_range(M, pinv, K)) {
        if (p > 0.0) throw EstimabilityError("K is not contained in range(M); criterion undefined for p > 0");
        return 0.0;
    }
    return value_from_n(linalg::symmetrize(K.transpose() * pinv * K), p);
}

Matrix phi_p_gradient(double p, const TransformSpec& transform, const Matrix& M) {
    const auto d = static_cast<std::size_t>(M.rows());
    if (!linalg::is_positive_definite(M, kPdCutoff)) throw SingularMatrixError("criterion gradient needs a positive definite M");
    const Matrix K = transform.matrix_for(d);
    const Matrix W = solve_pd(M, K);
    const Matrix N = linalg::symmetrize(K.transpose() * W);
    if (p == 0.0) {
        // ∇ det(N⁻¹)^{1/v} = Φ/v · W N⁻¹ Wᵀ.
        const double phi = phi_p_value(0.0, transform, M);
        const double v = static_cast<double>(N.rows());
        const Matrix inner = transform.kind == TransformSpec::Kind::identity ? W : Matrix(W * solve_pd(N, Matrix::Identity(N.rows(), N.cols())) * W.transpose());
        return linalg::symmetrize(phi / v * inner);
    }
    const double phi = value_from_n(N, p);
    const auto eig = linalg::symmetric_eigen(N);
    const double v = static_cast<double>(N.rows());
    // Φ^{1-p} μ^{-p-1} = Φ² (Φμ)^{-p-1}, which stays in range for large |p|.
    Vector scale(eig.values.size());
    for (Eigen::Index i = 0; i < scale.size(); ++i) scale(i) = phi * phi * std::pow(phi * eig.values(i), -p - 1.0) / v;
    const Matrix inner = eig.vectors * scale.asDiagonal() * eig.vectors.transpose();
    return linalg::symmetrize(W * inner * W.transpose());
}

void require_resolved(const CriterionSpec& crit) {
    if (!crit.references_resolved()) {
        throw CriterionError("compound criterion has unresolved nested-model reference values");
    }
}

double power_mean(const std::vector<double>& values, const std::vector<double>& beta, double q) {
    if (q == 0.0) {
        double logs = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (beta[i] == 0.0) continue;
            if (!(values[i] > 0.0)) return 0.0;
            logs += beta[i] * std::log(values[i]);
        }
        return std::exp(logs);
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (beta[i] == 0.0) continue;
        if (!(values[i] > 0.0)) {
            if (q < 0.0) return 0.0;
            continue;
        }
        sum += beta[i] * std::pow(values[i], q);
    }
    return std::pow(sum, 1.0 / q);
}

std::string format_number(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

} // namespace

TransformSpec TransformSpec::identity() { return {}; }

TransformSpec TransformSpec::matrix(Matrix K) {
    TransformSpec t;
    t.kind = Kind::matrix;
    t.K = std::move(K);
    return t;
}

TransformSpec TransformSpec::c_vector(Vector a) {
    TransformSpec t;
    t.kind = Kind::c_vector;
    t.a = std::move(a);
    return t;
}

TransformSpec TransformSpec::epsilon_augmented(Vector a, double epsilon) {
    TransformSpec t;
    t.kind = Kind::epsilon_augmented;
    t.a = std::move(a);
    t.epsilon = epsilon;
    return t;
}

Matrix TransformSpec::matrix_for(std::size_t d) const {
    const auto n = static_cast<Eigen::Index>(d);
    switch (kind) {
    case Kind::identity: return Matrix::Identity(n, n);
    case Kind::matrix: return K;
    case Kind::c_vector: return a;
    case Kind::epsilon_augmented: {
        Eigen::Index pivot = 0;
        a.cwiseAbs().maxCoeff(&pivot);
        Matrix out = Matrix::Zero(n, n);
        out.col(0) = a;
        Eigen::Index col = 1;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == pivot) continue;
            out(j, col++) = epsilon;
        }
        return out;
    }
    }
    return Matrix::Identity(n, n);
}

std::size_t TransformSpec::columns(std::size_t d) const {
    switch (kind) {
    case Kind::matrix: return static_cast<std::size_t>(K.cols());
    case Kind::c_vector: return 1;
    default: return d;
    }
}

CriterionSpec CriterionSpec::phi_p(double p, TransformSpec transform) {
    CriterionSpec c;
    c.p = p;
    c.transform = std::move(transform);
    return c;
}

CriterionSpec CriterionSpec::c(Vector a) {
    return phi_p(-1.0, TransformSpec::c_vector(std::move(a)));
}

CriterionSpec CriterionSpec::e(std::size_t d, std::size_t index) {
    if (index < 1 || index > d) throw CriterionError("unit vector index must lie in [1, d]");
    Vector a = Vector::Zero(static_cast<Eigen::Index>(d));
    a(static_cast<Eigen::Index>(index - 1)) = 1.0;
    return c(std::move(a));
}

CriterionSpec CriterionSpec::mixture(std::size_t d, double inner_p, double outer_p, std::vector<double> beta) {
    if (d < 2) throw CriterionError("compound criterion needs d >= 2");
    if (beta.empty()) beta.assign(d - 1, 1.0 / static_cast<double>(d - 1));
    CriterionSpec c;
    c.kind = Kind::compound;
    c.p = inner_p;
    c.compound = CompoundSpec{inner_p, outer_p, std::move(beta), {}};
    return c;
}

bool CriterionSpec::references_resolved() const {
    if (kind != Kind::compound) return true;
    return compound && compound->reference_values.size() == compound->beta.size() &&
           std::all_of(compound->reference_values.begin(), compound->reference_values.end(),
                       [](double v) { return v > 0.0 && std::isfinite(v); });
}

bool CriterionSpec::strictly_concave() const {
    if (kind == Kind::compound) return compound && !compound->beta.empty() && compound->beta.back() > 0.0 && compound->inner_p < 1.0;
    if (p >= 1.0) return false;
    switch (transform.kind) {
    case TransformSpec::Kind::identity:
    case TransformSpec::Kind::epsilon_augmented: return true;
    case TransformSpec::Kind::matrix: return transform.K.rows() == transform.K.cols();
    case TransformSpec::Kind::c_vector: return transform.a.size() == 1;
    }
    return false;
}

std::string CriterionSpec::label() const {
    if (kind == Kind::compound) {
        return "compound(p=" + format_number(compound->inner_p) + ", p'=" + format_number(compound->outer_p) + ")";
    }
    switch (transform.kind) {
    case TransformSpec::Kind::c_vector: {
        std::string s = "c(a=[";
        for (Eigen::Index i = 0; i < transform.a.size(); ++i) {
            if (i) s += ",";
            s += format_number(transform.a(i));
        }
        return s + "])";
    }
    case TransformSpec::Kind::epsilon_augmented:
        return "phi_p(p=" + format_number(p) + ", g_eps, eps=" + format_number(transform.epsilon) + ")";
    case TransformSpec::Kind::matrix: return "phi_p(p=" + format_number(p) + ", K)";
    case TransformSpec::Kind::identity:
        if (p == 0.0) return "D";
        if (p == -1.0) return "A";
        return "phi_p(p=" + format_number(p) + ")";
    }
    return "phi_p";
}

void CriterionSpec::validate(std::size_t d) const {
    if (kind == Kind::compound) {
        if (!compound) throw CriterionError("compound criterion needs mixture parameters");
        const auto& c = *compound;
        if (!(c.inner_p <= 0.0) || c.inner_p <= kMinP) throw CriterionError("compound inner p must lie in (-50, 0]");
        if (!(c.outer_p <= 0.0) || c.outer_p <= kMinP) throw CriterionError("compound outer p' must lie in (-50, 0]");
        if (c.beta.size() + 1 != d) throw CriterionError("compound beta needs one entry per nested degree 1..d-1");
        double sum = 0.0;
        for (double b : c.beta) {
            if (!(b >= 0.0)) throw CriterionError("compound beta entries must be nonnegative");
            sum += b;
        }
        if (std::abs(sum - 1.0) > 1e-9) throw CriterionError("compound beta must sum to 1");
        if (!(c.beta.back() > 0.0)) throw CriterionError("compound beta must put positive mass on the largest degree");
        if (!c.reference_values.empty() && c.reference_values.size() != c.beta.size()) {
            throw CriterionError("compound reference values need one entry per nested degree");
        }
        return;
    }
    if (std::isnan(p) || p > 1.0) throw CriterionError("p must lie in (-inf, 1]");
    if (p <= kMinP) {
        throw CriterionError("p <= -50 is rejected: E-optimality is not smooth; use a moderate negative p as an approximation");
    }
    const auto n = static_cast<Eigen::Index>(d);
    switch (transform.kind) {
    case TransformSpec::Kind::identity: break;
    case TransformSpec::Kind::matrix: {
        if (transform.K.rows() != n) throw CriterionError("K must have d rows");
        if (transform.K.cols() < 1 || transform.K.cols() > n) throw CriterionError("K must have between 1 and d columns");
        Eigen::FullPivLU<Matrix> lu(transform.K);
        if (lu.rank() != transform.K.cols()) throw CriterionError("K must have full column rank");
        break;
    }
    case TransformSpec::Kind::c_vector:
    case TransformSpec::Kind::epsilon_augmented:
        if (transform.a.size() != n) throw CriterionError("c-vector a must have d entries");
        if (transform.a.isZero(0.0)) throw CriterionError("c-vector a must be nonzero");
        if (transform.kind == TransformSpec::Kind::epsilon_augmented && !(transform.epsilon > 0.0)) {
            throw CriterionError("epsilon must be positive");
        }
        break;
    }
}

double phi_value(const CriterionSpec& crit, const Matrix& M) {
    if (crit.kind == CriterionSpec::Kind::phi_p) return phi_p_value(effective_p(crit), crit.transform, M);
    require_resolved(crit);
    return power_mean(compound_efficiencies(crit, M), crit.compound->beta, crit.compound->outer_p);
}

Matrix phi_gradient(const CriterionSpec& crit, const Matrix& M) {
    if (crit.kind == CriterionSpec::Kind::phi_p) return phi_p_gradient(effective_p(crit), crit.transform, M);
    require_resolved(crit);
    if (!linalg::is_positive_definite(M, kPdCutoff)) throw SingularMatrixError("criterion gradient needs a positive definite M");
    const auto& c = *crit.compound;
    const auto eff = compound_efficiencies(crit, M);
    const double phi = power_mean(eff, c.beta, c.outer_p);
    Matrix G = Matrix::Zero(M.rows(), M.cols());
    for (std::size_t l = 0; l < eff.size(); ++l) {
        if (c.beta[l] == 0.0) continue;
        const auto n = static_cast<Eigen::Index>(l + 2);
        const Matrix block = M.topLeftCorner(n, n);
        const double outer = std::pow(phi, 1.0 - c.outer_p) * c.beta[l] * std::pow(eff[l], c.outer_p - 1.0);
        G.topLeftCorner(n, n) += outer / c.reference_values[l] * phi_p_gradient(c.inner_p, TransformSpec::identity(), block);
    }
    return G;
}

std::vector<double> compound_efficiencies(const CriterionSpec& crit, const Matrix& M) {
    if (crit.kind != CriterionSpec::Kind::compound) throw CriterionError("efficiencies per degree need a compound criterion");
    require_resolved(crit);
    const auto& c = *crit.compound;
    if (static_cast<std::size_t>(M.rows()) != c.beta.size() + 1) throw CriterionError("compound criterion dimension mismatch");
    std::vector<double> eff(c.beta.size());
    for (std::size_t l = 0; l < eff.size(); ++l) {
        const auto n = static_cast<Eigen::Index>(l + 2);
        eff[l] = phi_p_value(c.inner_p, TransformSpec::identity(), M.topLeftCorner(n, n)) / c.reference_values[l];
    }
    return eff;
}

double compound_value(const CriterionSpec& crit, const Model& model, const Design& design) {
    if (crit.kind != CriterionSpec::Kind::compound) throw CriterionError("compound_value needs a compound criterion");
    return phi_value(crit, info_matrix(model, design));
}

double efficiency(const CriterionSpec& crit, const Model& model, const Design& design, const Design& reference) {
    const double ref = phi_value(crit, info_matrix(model, reference));
    if (!(ref > 0.0)) throw CriterionError("reference design is singular for the criterion");
    return phi_value(crit, info_matrix(model, design)) / ref;
}

std::optional<double> ReferenceCache::find(const Key& key) const {
    std::lock_guard lock(mutex_);
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

void ReferenceCache::insert(const Key& key, double value) {
    std::lock_guard lock(mutex_);
    values_.emplace(key, value);
}

std::size_t ReferenceCache::size() const {
    std::lock_guard lock(mutex_);
    return values_.size();
}

} // namespace satdesign
