#pragma once

#include "satdesign/complete_class.hpp"
#include "satdesign/criteria.hpp"
#include "satdesign/design.hpp"
#include "satdesign/design_space.hpp"
#include "satdesign/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace satdesign {

enum class ClosedFormTag { D, e2, e3 };

std::string to_string(ClosedFormTag tag);

/// Explicit optimal designs: Poisson D and e₂; Emax and log-linear D, e₃
/// and e₂. Throws ClosedFormError when no formula applies.
Design closed_form(const Model& model, const DesignSpace& region, ClosedFormTag tag);

/// Middle support point of the Emax D-optimal design on [L, U].
double emax_middle_point(double lower, double upper, double theta3);
/// Middle support point of the log-linear D-optimal design on [L, U].
double log_linear_middle_point(double lower, double upper, double theta3);

/// κ evenly spaced points on [L, U]; optionally OWEA II refinement starting
/// from a coarse grid of κ₀ points.
struct GridSpec {
    std::size_t kappa = 1000;
    std::optional<std::size_t> coarse;
    std::size_t refine_radius = 2;

    void validate() const;
    double step(const DesignSpace& region) const;
};

struct OweaOptions {
    double sensitivity_tol = 1e-6;   // relative to Φ
    int max_iter = 500;
};

struct OweaReport {
    Design design;
    double criterion_value = 0.0;
    double max_sensitivity = 0.0;
    int iterations = 0;
    std::size_t grid_points = 0;
};

/// Weight-exchange on a grid: optimize weights on the current support, add
/// the grid point of largest sensitivity, repeat.
OweaReport owea_solve(const Model& model, const CriterionSpec& crit, const DesignSpace& region,
                      const GridSpec& grid, const OweaOptions& opts = {});

struct WeightResult {
    std::vector<double> weights;
    double criterion_value = 0.0;
    double kkt_residual = 0.0;
    int iterations = 0;
};

/// Maximizes Φ over the weight simplex for fixed support points.
WeightResult weight_optimize(const Model& model, const CriterionSpec& crit, const std::vector<double>& support,
                             const std::vector<double>& initial_weights = {});

/// Noninferior design in the complete class matching Σ ωΨ_ℓ(c) for
/// ℓ = 0..k-1. A design already in the class is returned unchanged.
Design moment_match_reduce(const ClassDescriptor& desc, const Design& design);

enum class LoewnerOrder { equal, dominates, dominated, incomparable };

std::string to_string(LoewnerOrder order);

/// Compares M1 and M2 through the eigenvalues of M1 − M2.
LoewnerOrder loewner_compare(const Matrix& m1, const Matrix& m2);

} // namespace satdesign
