#pragma once

#include "satdesign/design_space.hpp"
#include "satdesign/linalg.hpp"
#include "satdesign/model.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace satdesign {

/// Monotone reparameterization c = c(x) of the covariate.
struct CTransform {
    std::function<double(double)> forward;
    std::function<double(double)> inverse;
    bool increasing = true;
    std::string label = "c = x";

    static CTransform identity();
    static CTransform affine(double slope, double offset, std::string label);
};

/// A complete class Ξ of designs for one model, parameter and region.
///
/// Cases follow the four complete-class shapes: (a) k = 2m-1 with the
/// A-side endpoint fixed, (b) k = 2m-1 with the B-side endpoint fixed,
/// (c) k = 2m with no fixed point, (d) k = 2m-2 with both endpoints fixed.
/// fix_lower/fix_upper are already translated to the x-scale.
struct ClassDescriptor {
    enum class Case { a, b, c, d };

    Case which = Case::d;
    std::size_t m = 0;
    std::size_t k = 0;
    bool fix_lower = false;
    bool fix_upper = false;
    DesignSpace region = DesignSpace::real_line();
    CTransform c_transform = CTransform::identity();
    /// Ψ₀ ≡ 1, Ψ₁, …, Ψ_{k-1} as functions of c. Empty when not registered.
    std::vector<std::function<double(double)>> psi;
    std::vector<std::string> psi_labels;
    /// Decomposition matrix P(θ); populated only where registered (LINEXP).
    std::optional<Matrix> P;
    /// Characteristic covariate length, used to window infinite regions.
    double scale = 1.0;
    std::string note;

    std::size_t fixed_count() const { return (fix_lower ? 1u : 0u) + (fix_upper ? 1u : 0u); }
    std::size_t free_points() const { return m - fixed_count(); }
    bool has_psi() const { return !psi.empty(); }
    /// [A, B], the image of the region under c.
    double c_lower() const;
    double c_upper() const;
    /// Ψ_ℓ evaluated at covariate x.
    double psi_at(std::size_t ell, double x) const;
};

std::string to_string(ClassDescriptor::Case which);

/// Registered complete class for (model, θ, region). Throws
/// NoCompleteClassError outside a classification's validity region.
ClassDescriptor classify(const Model& model, const DesignSpace& region);

struct ChebyshevReport {
    std::size_t system_size = 0;
    std::size_t tuples_tested = 0;
    /// Smallest |det| seen, raw and normalized by column norms and the
    /// Vandermonde product of the tuple.
    double min_abs_determinant = 0.0;
    double min_normalized_determinant = 0.0;
    bool violated = false;
    std::vector<double> witness;   // tuple (x-scale) exhibiting the violation
    std::string reason;

    std::string verdict() const { return violated ? "violated-at" : "no-violation-found"; }
};

/// Samples increasing k-tuples from [A, B] and checks that det[Ψ_ℓ(c_j)]
/// keeps one sign and stays away from zero. Infinite ends are windowed at
/// ten scale lengths from the finite end.
ChebyshevReport verify_psi_chebyshev(const ClassDescriptor& desc, std::size_t samples, std::uint64_t seed);

/// Same check for an arbitrary function system on an interval of c.
ChebyshevReport verify_chebyshev_system(const std::vector<std::function<double(double)>>& system,
                                        double lower, double upper, std::size_t samples, std::uint64_t seed);

/// F(c) for LINEXP: [[8, 2e^c], [2e^c, 8e^{2c}]].
Matrix fc_matrix_linexp(double c);

/// Samples increasing (d-1)-tuples x₁ < … < x_{d-1} in the region and
/// checks det[f(x₁) … f(x_{d-1}) a] ≠ 0 with constant sign.
ChebyshevReport check_estimability(const Model& model, const Vector& a, const DesignSpace& region,
                                   std::size_t samples, std::uint64_t seed);

} // namespace satdesign
