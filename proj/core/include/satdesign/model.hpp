#pragma once

#include "satdesign/design.hpp"
#include "satdesign/design_space.hpp"
#include "satdesign/linalg.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace satdesign {

enum class ModelKind {
    poisson,
    logistic,
    probit,
    michaelis_menten,
    emax,
    log_linear,
    linexp,
    double_exponential,
    exponential,
    polynomial,
};

std::string_view to_string(ModelKind kind);

/// Efficiency function λ(x) of a heteroscedastic polynomial model
/// (variance σ²/λ(x)).
struct EfficiencyFunction {
    enum class Kind {
        constant,        // 1
        one_minus_x,     // 1 - x on [-1, 1]
        one_plus_x,      // 1 + x on [-1, 1]
        exp_neg_x,       // e^{-x} on [0, inf)
        jacobi,          // (1 - x)^{u+1} (1 + x)^{v+1} on [-1, 1]
        laguerre,        // x^{u+1} e^{-x} on [0, inf)
        gauss,           // e^{-x^2} on the real line
        cauchy,          // (1 + x^2)^{-t} on the real line
    };
    Kind kind = Kind::constant;
    double u = 0.0;
    double v = 0.0;
    double t = 0.0;

    double operator()(double x) const;
    double derivative(double x) const;
    /// The full design region on which λ is defined.
    DesignSpace full_region() const;
    std::string label() const;
};

/// A single-covariate model bound to a parameter vector θ. Immutable.
///
/// The per-observation information is unit_info(x) = weight(x) · f fᵀ where
/// f = ∂η/∂θ; weight() is 1 for constant-variance regression, λ(x) for the
/// heteroscedastic polynomial and the GLM weight for Poisson, logistic and
/// probit regression.
class Model {
public:
    virtual ~Model() = default;

    virtual ModelKind kind() const = 0;
    const std::string& name() const { return name_; }
    std::size_t dim() const { return static_cast<std::size_t>(theta_.size()); }
    const Vector& theta() const { return theta_; }
    /// Largest region on which the model is defined.
    const DesignSpace& natural_space() const { return space_; }

    /// Linear predictor η(x, θ); the mean response for regression models.
    virtual double mean(double x) const = 0;
    /// f(x, θ) = ∂η/∂θ.
    virtual Vector gradient(double x) const = 0;
    /// ∂f/∂x. The default is a central finite difference.
    virtual Vector gradient_dx(double x) const;
    virtual double weight(double x) const;
    virtual double weight_dx(double x) const;

    Matrix unit_info(double x) const;
    Matrix unit_info_dx(double x) const;

    /// Characteristic length of the covariate, used for starting designs and
    /// for compactifying infinite regions.
    virtual double scale() const { return 1.0; }
    /// Location used with scale() when both ends of the region are infinite.
    virtual double center() const { return 0.0; }

    /// The nested model with `dim` parameters whose information matrix is the
    /// leading dim×dim block of this one. Only polynomial models nest.
    virtual std::shared_ptr<const Model> nested(std::size_t dim) const;

    /// Optional efficiency function, set for the heteroscedastic polynomial.
    virtual std::optional<EfficiencyFunction> efficiency_function() const { return std::nullopt; }

    /// A short note for models whose formulas come from outside the core
    /// references (e.g. GLM weights).
    virtual std::string provenance() const { return {}; }

protected:
    Model(std::string name, Vector theta, DesignSpace space);

private:
    std::string name_;
    Vector theta_;
    DesignSpace space_;
};

using ModelPtr = std::shared_ptr<const Model>;

/// Per-model options beyond θ.
struct ModelOptions {
    std::optional<EfficiencyFunction> efficiency;
};

/// Catalog of named model factories.
class ModelRegistry {
public:
    using Factory = std::function<ModelPtr(const Vector& theta, const ModelOptions& options)>;

    struct Entry {
        std::string description;
        Factory factory;
    };

    void add(std::string name, std::string description, Factory factory);

    /// Throws UnknownModelError or ParameterError.
    ModelPtr make(std::string_view name, const Vector& theta, const ModelOptions& options = {}) const;

    bool contains(std::string_view name) const;
    std::vector<std::string> names() const;
    const std::string& description(std::string_view name) const;

private:
    std::map<std::string, Entry, std::less<>> entries_;
};

/// Registry with every built-in model.
ModelRegistry register_builtin_models();

/// Process-wide instance of the built-in registry.
const ModelRegistry& builtin_models();

// Direct constructors, validated the same way as the registry.
ModelPtr make_poisson(double theta1, double theta2);
ModelPtr make_logistic(double theta1, double theta2);
ModelPtr make_probit(double theta1, double theta2);
ModelPtr make_michaelis_menten(double theta1, double theta2);
ModelPtr make_emax(double theta1, double theta2, double theta3);
ModelPtr make_log_linear(double theta1, double theta2, double theta3);
ModelPtr make_linexp(double theta1, double theta2, double theta3, double theta4);
ModelPtr make_double_exponential(double theta1, double theta2, double theta3, double theta4);
ModelPtr make_exponential(const Vector& theta);
ModelPtr make_polynomial(std::size_t dim, EfficiencyFunction efficiency = {}, Vector theta = {});

/// Σ ωᵢ · unit_info(xᵢ). Throws DesignSpaceError when a point falls outside
/// `region` (the model's natural space when omitted).
Matrix info_matrix(const Model& model, const Design& design);
Matrix info_matrix(const Model& model, const Design& design, const DesignSpace& region);

} // namespace satdesign
