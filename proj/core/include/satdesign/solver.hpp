#pragma once

#include "satdesign/complete_class.hpp"
#include "satdesign/criteria.hpp"
#include "satdesign/design.hpp"
#include "satdesign/design_space.hpp"
#include "satdesign/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace satdesign {

struct SolveOptions {
    int max_iter = 200;
    /// Stopping tolerance on ‖∇ log Φ̃‖∞.
    double grad_tol = 1e-10;
    double armijo = 1e-4;
    double backtrack = 0.5;
    /// Fraction of the distance to the nearest constraint a step may cover.
    double boundary_fraction = 0.9;
    int multistart = 8;
    std::uint64_t seed = 20240611;
    std::vector<double> epsilon_schedule{1e-3, 1e-4, 1e-5, 1e-6, 1e-7};
    /// Optional warm start; must fit the complete class shape.
    std::optional<Design> initial_design;
    bool certify = true;
    std::size_t scan_resolution = 2048;
    /// Certificate tolerance relative to the criterion value.
    double sensitivity_tol = 1e-6;

    void validate() const;
};

/// Reduced unknowns: free design points followed by ω₂..ω_m.
struct ZVector {
    std::vector<double> free_points;
    std::vector<double> free_weights;

    std::size_t size() const { return free_points.size() + free_weights.size(); }
    Vector to_vector() const;
    static ZVector from_vector(const Vector& z, std::size_t n_points);
};

/// Φ̃(Z) for a fixed model, criterion, region and class shape.
class ReducedObjective {
public:
    ReducedObjective(const Model& model, CriterionSpec crit, DesignSpace region, std::size_t m,
                     bool fix_lower, bool fix_upper);

    std::size_t m() const { return m_; }
    std::size_t free_point_count() const { return m_ - (fix_lower_ ? 1 : 0) - (fix_upper_ ? 1 : 0); }
    std::size_t size() const { return free_point_count() + m_ - 1; }
    bool fix_lower() const { return fix_lower_; }
    bool fix_upper() const { return fix_upper_; }
    const DesignSpace& region() const { return region_; }
    const CriterionSpec& criterion() const { return crit_; }
    const Model& model() const { return *model_; }

    /// Support points and weights in order, including fixed endpoints. The
    /// weights may be negative for infeasible Z.
    void unpack(const ZVector& z, std::vector<double>& points, std::vector<double>& weights) const;
    Design assemble(const ZVector& z) const;
    ZVector encode(const Design& design) const;

    Matrix information(const ZVector& z) const;
    /// Φ̃(Z). Returns 0 when the assembled matrix cannot support the criterion.
    double value(const ZVector& z) const;
    /// ∇Φ̃(Z). Throws SingularMatrixError when M is not positive definite.
    Vector gradient(const ZVector& z) const;
    /// Value and ∇ log Φ̃ in one pass.
    double log_value_and_gradient(const ZVector& z, Vector& grad) const;

    /// Largest α ≤ 1 keeping Z + α·dz inside every constraint scaled by
    /// `fraction`, and the index of the binding constraint.
    double max_step(const ZVector& z, const Vector& dz, double fraction, int& binding) const;
    /// Slack of each constraint: point gaps and endpoint distances, then
    /// weights ω₁..ω_m.
    std::vector<double> slacks(const ZVector& z) const;
    std::size_t point_constraint_count() const;

private:
    const Model* model_;
    CriterionSpec crit_;
    DesignSpace region_;
    std::size_t m_;
    bool fix_lower_;
    bool fix_upper_;
};

/// objective(model, crit, z) for a given complete class.
double objective(const Model& model, const CriterionSpec& crit, const ClassDescriptor& desc, const ZVector& z);
Vector objective_gradient(const Model& model, const CriterionSpec& crit, const ClassDescriptor& desc,
                          const ZVector& z);

struct EquivalenceCertificate {
    double max_sensitivity = 0.0;            // max over x of ψ(x)
    double max_sensitivity_violation = 0.0;  // max(0, max ψ)
    double argmax = 0.0;
    double support_residual = 0.0;           // max |ψ| at support points
    double tolerance = 0.0;
    std::size_t scan_points = 0;
    bool passed = false;
};

struct SolveReport {
    Design design;
    double criterion_value = 0.0;
    double grad_norm = 0.0;
    bool feasible = false;
    bool boundary_fallback_used = false;
    double multistart_agreement = 0.0;
    std::size_t starts = 0;
    std::size_t starts_converged = 0;
    bool non_unique = false;
    int iterations = 0;
    std::size_t m = 0;
    bool fix_lower = false;
    bool fix_upper = false;
    EquivalenceCertificate certificate;
    /// Φ̃ after each accepted step of the returned run.
    std::vector<double> value_trace;
    std::string message;
};

/// Damped Newton over the complete class, with multistart, boundary
/// fallback and an equivalence-theorem certificate.
SolveReport newton_solve(const Model& model, const CriterionSpec& crit, const DesignSpace& region,
                         const SolveOptions& opts = {});

/// Same, on an explicit class shape (used by fallbacks and the ε-sequence).
SolveReport newton_solve_shape(const Model& model, const CriterionSpec& crit, const DesignSpace& region,
                               std::size_t m, bool fix_lower, bool fix_upper, const SolveOptions& opts);

/// Returns `full` unchanged when its support fits in `region`; otherwise
/// re-solves with the violated endpoints adjoined to the fixed set.
SolveReport restrict_region(const SolveReport& full, const DesignSpace& region, const Model& model,
                            const CriterionSpec& crit, const SolveOptions& opts = {});

/// ψ scan over the region with golden-section refinement of the top maxima.
EquivalenceCertificate verify_optimality(const Model& model, const CriterionSpec& crit, const Design& design,
                                         const DesignSpace& region, std::size_t scan_resolution = 2048,
                                         double relative_tol = 1e-6);

struct UniquenessReport {
    double agreement = 0.0;   // max pairwise Design::distance
    std::size_t starts = 0;
    std::size_t converged = 0;
    std::vector<Design> designs;   // converged starts only
};

/// Solves from `starts` randomized initializations without multistart
/// pooling and compares the converged designs.
UniquenessReport uniqueness_probe(const Model& model, const CriterionSpec& crit, const DesignSpace& region,
                                  std::size_t starts, const SolveOptions& opts = {});

struct EpsilonStep {
    double epsilon = 0.0;
    SolveReport report;
    double c_value = 0.0;
    double c_efficiency = 0.0;
};

struct EpsilonReport {
    std::vector<EpsilonStep> steps;
    Design reference;
    double reference_value = 0.0;
    std::string reference_method;   // "direct", "elfving" or "last-epsilon"
    bool monotone = false;
    bool truncated = false;
    Design limit;                   // last step pruned of vanishing weights
    std::string message;
};

/// Φ_p designs for g_ε over the ε schedule, scored under c-optimality for a.
EpsilonReport epsilon_c_solve(const Model& model, const Vector& a, double p, const DesignSpace& region,
                              const SolveOptions& opts = {});

/// Best c-optimal design found for aᵀθ, with its value and method tag.
struct CReference {
    Design design;
    double value = 0.0;
    std::string method;
};
std::optional<CReference> c_optimal_reference(const Model& model, const Vector& a, const DesignSpace& region,
                                              const SolveOptions& opts = {});

/// Fills compound reference values by solving each nested model; values are
/// memoized in `cache` when given.
CriterionSpec resolve_references(const CriterionSpec& crit, const Model& model, const DesignSpace& region,
                                 const SolveOptions& opts = {}, ReferenceCache* cache = nullptr);

/// The region searched by default: the model's natural space.
DesignSpace full_region(const Model& model);

} // namespace satdesign
