#pragma once

#include "satdesign/design.hpp"
#include "satdesign/design_space.hpp"
#include "satdesign/linalg.hpp"
#include "satdesign/model.hpp"

#include <cstddef>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace satdesign {

/// The linear function g(θ) = Kᵀθ whose information a criterion measures.
struct TransformSpec {
    enum class Kind { identity, matrix, c_vector, epsilon_augmented };

    Kind kind = Kind::identity;
    Matrix K;        // matrix kind: d×v, full column rank
    Vector a;        // c_vector and epsilon_augmented kinds
    double epsilon = 0.0;

    static TransformSpec identity();
    static TransformSpec matrix(Matrix K);
    static TransformSpec c_vector(Vector a);
    /// g_ε(θ) = (aᵀθ, εθ_j for j ≠ pivot), the pivot being the largest |a_j|.
    static TransformSpec epsilon_augmented(Vector a, double epsilon);

    /// K as a d×v matrix for a model with d parameters.
    Matrix matrix_for(std::size_t d) const;
    std::size_t columns(std::size_t d) const;
};

/// Nested-model mixture Φ_{p,p',β}: the β-weighted p'-power mean of the
/// Φ_p-efficiencies of the leading (ℓ+1)×(ℓ+1) blocks, ℓ = 1..d-1.
struct CompoundSpec {
    double inner_p = 0.0;
    double outer_p = 0.0;
    std::vector<double> beta;               // indexed by degree ℓ-1
    std::vector<double> reference_values;   // optimal Φ_p of each nested model
};

struct CriterionSpec {
    enum class Kind { phi_p, compound };

    Kind kind = Kind::phi_p;
    double p = 0.0;
    TransformSpec transform;
    std::optional<CompoundSpec> compound;

    static CriterionSpec phi_p(double p, TransformSpec transform = TransformSpec::identity());
    static CriterionSpec D() { return phi_p(0.0); }
    static CriterionSpec A() { return phi_p(-1.0); }
    static CriterionSpec c(Vector a);
    static CriterionSpec e(std::size_t d, std::size_t index);
    /// beta empty means uniform over degrees 1..d-1.
    static CriterionSpec mixture(std::size_t d, double inner_p, double outer_p,
                                 std::vector<double> beta = {});

    bool is_c_optimality() const { return kind == Kind::phi_p && transform.kind == TransformSpec::Kind::c_vector; }
    bool references_resolved() const;
    /// Strictly isotonic and strictly concave on PD(d).
    bool strictly_concave() const;
    std::string label() const;

    /// Throws CriterionError when the spec is malformed for dimension d.
    void validate(std::size_t d) const;
};

/// Φ(M). Singular M is handled through a symmetric generalized inverse; when
/// K is not estimable the value is 0 for p ≤ 0 and EstimabilityError for p > 0.
double phi_value(const CriterionSpec& crit, const Matrix& M);

/// ∂Φ/∂M for positive definite M, so that Φ(M+H) ≈ Φ(M) + ⟨∂Φ/∂M, H⟩.
Matrix phi_gradient(const CriterionSpec& crit, const Matrix& M);

/// Efficiency of `design` relative to `reference`: the ratio of criterion
/// values (for D this is the det ratio to the power 1/v).
double efficiency(const CriterionSpec& crit, const Model& model, const Design& design,
                  const Design& reference);

/// Φ_{p,p',β} value of a design. Requires resolved reference values.
double compound_value(const CriterionSpec& crit, const Model& model, const Design& design);

/// Per-degree Φ_p-efficiencies eff_ℓ(ξ), ℓ = 1..d-1.
std::vector<double> compound_efficiencies(const CriterionSpec& crit, const Matrix& M);

/// Directional derivative ψ(x) = ⟨∂Φ/∂M, M_x − M_ξ⟩ of the general
/// equivalence theorem.
inline double sensitivity(const Matrix& gradient, const Matrix& info_xi, const Matrix& info_x) {
    return linalg::inner(gradient, info_x - info_xi);
}

/// Thread-safe cache of nested-model reference values, keyed by
/// (model, degree, region, θ, criterion p). Inserts are idempotent.
class ReferenceCache {
public:
    struct Key {
        std::string model;
        std::size_t degree;
        double lower;
        double upper;
        std::vector<double> theta;
        double p;
        auto operator<=>(const Key&) const = default;
    };

    std::optional<double> find(const Key& key) const;
    void insert(const Key& key, double value);
    std::size_t size() const;

private:
    mutable std::mutex mutex_;
    std::map<Key, double> values_;
};

} // namespace satdesign
