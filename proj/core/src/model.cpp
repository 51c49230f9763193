#include "satdesign/model.hpp"

#include "satdesign/errors.hpp"

#include <cmath>
#include <sstream>

namespace satdesign {

std::string_view to_string(ModelKind kind) {
    switch (kind) {
    case ModelKind::poisson: return "poisson";
    case ModelKind::logistic: return "logistic";
    case ModelKind::probit: return "probit";
    case ModelKind::michaelis_menten: return "michaelis_menten";
    case ModelKind::emax: return "emax";
    case ModelKind::log_linear: return "log_linear";
    case ModelKind::linexp: return "linexp";
    case ModelKind::double_exponential: return "double_exponential";
    case ModelKind::exponential: return "exponential";
    case ModelKind::polynomial: return "polynomial";
    }
    return "unknown";
}

double EfficiencyFunction::operator()(double x) const {
    switch (kind) {
    case Kind::constant: return 1.0;
    case Kind::one_minus_x: return 1.0 - x;
    case Kind::one_plus_x: return 1.0 + x;
    case Kind::exp_neg_x: return std::exp(-x);
    case Kind::jacobi: return std::pow(1.0 - x, u + 1.0) * std::pow(1.0 + x, v + 1.0);
    case Kind::laguerre: return std::pow(x, u + 1.0) * std::exp(-x);
    case Kind::gauss: return std::exp(-x * x);
    case Kind::cauchy: return std::pow(1.0 + x * x, -t);
    }
    return 1.0;
}

double EfficiencyFunction::derivative(double x) const {
    switch (kind) {
    case Kind::constant: return 0.0;
    case Kind::one_minus_x: return -1.0;
    case Kind::one_plus_x: return 1.0;
    case Kind::exp_neg_x: return -std::exp(-x);
    case Kind::jacobi: {
        const double a = 1.0 - x;
        const double b = 1.0 + x;
        return -(u + 1.0) * std::pow(a, u) * std::pow(b, v + 1.0) + (v + 1.0) * std::pow(a, u + 1.0) * std::pow(b, v);
    }
    case Kind::laguerre: return ((u + 1.0) * std::pow(x, u) - std::pow(x, u + 1.0)) * std::exp(-x);
    case Kind::gauss: return -2.0 * x * std::exp(-x * x);
    case Kind::cauchy: return -2.0 * t * x * std::pow(1.0 + x * x, -t - 1.0);
    }
    return 0.0;
}

DesignSpace EfficiencyFunction::full_region() const {
    switch (kind) {
    case Kind::constant: return DesignSpace::real_line();
    case Kind::one_minus_x:
    case Kind::one_plus_x:
    case Kind::jacobi: return DesignSpace::closed(-1.0, 1.0);
    case Kind::exp_neg_x:
    case Kind::laguerre: return DesignSpace(0.0, kInfinity);
    case Kind::gauss:
    case Kind::cauchy: return DesignSpace::real_line();
    }
    return DesignSpace::real_line();
}

std::string EfficiencyFunction::label() const {
    std::ostringstream os;
    switch (kind) {
    case Kind::constant: os << "1"; break;
    case Kind::one_minus_x: os << "1-x"; break;
    case Kind::one_plus_x: os << "1+x"; break;
    case Kind::exp_neg_x: os << "exp(-x)"; break;
    case Kind::jacobi: os << "(1-x)^" << u + 1.0 << "(1+x)^" << v + 1.0; break;
    case Kind::laguerre: os << "x^" << u + 1.0 << "exp(-x)"; break;
    case Kind::gauss: os << "exp(-x^2)"; break;
    case Kind::cauchy: os << "(1+x^2)^-" << t; break;
    }
    return os.str();
}

Model::Model(std::string name, Vector theta, DesignSpace space)
    : name_(std::move(name)), theta_(std::move(theta)), space_(space) {}

Vector Model::gradient_dx(double x) const {
    const double h = 1e-5 * (scale() + std::abs(x));
    return (gradient(x + h) - gradient(x - h)) / (2.0 * h);
}

double Model::weight(double) const { return 1.0; }

double Model::weight_dx(double x) const {
    const double h = 1e-5 * (scale() + std::abs(x));
    return (weight(x + h) - weight(x - h)) / (2.0 * h);
}

Matrix Model::unit_info(double x) const {
    const Vector f = gradient(x);
    return weight(x) * (f * f.transpose());
}

Matrix Model::unit_info_dx(double x) const {
    const Vector f = gradient(x);
    const Vector df = gradient_dx(x);
    const Matrix cross = df * f.transpose();
    return weight_dx(x) * (f * f.transpose()) + weight(x) * (cross + cross.transpose());
}

std::shared_ptr<const Model> Model::nested(std::size_t) const {
    throw ParameterError("model '" + name_ + "' has no nested submodels");
}

void ModelRegistry::add(std::string name, std::string description, Factory factory) {
    entries_[std::move(name)] = Entry{std::move(description), std::move(factory)};
}

ModelPtr ModelRegistry::make(std::string_view name, const Vector& theta, const ModelOptions& options) const {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw UnknownModelError("unknown model '" + std::string(name) + "'");
    return it->second.factory(theta, options);
}

bool ModelRegistry::contains(std::string_view name) const {
    return entries_.find(name) != entries_.end();
}

std::vector<std::string> ModelRegistry::names() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& [name, entry] : entries_) out.push_back(name);
    return out;
}

const std::string& ModelRegistry::description(std::string_view name) const {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw UnknownModelError("unknown model '" + std::string(name) + "'");
    return it->second.description;
}

const ModelRegistry& builtin_models() {
    static const ModelRegistry registry = register_builtin_models();
    return registry;
}

Matrix info_matrix(const Model& model, const Design& design) {
    return info_matrix(model, design, model.natural_space());
}

Matrix info_matrix(const Model& model, const Design& design, const DesignSpace& region) {
    const auto d = static_cast<Eigen::Index>(model.dim());
    Matrix m = Matrix::Zero(d, d);
    for (std::size_t i = 0; i < design.size(); ++i) {
        const double x = design.point(i);
        if (!region.contains(x)) {
            std::ostringstream os;
            os << "design point " << x << " lies outside " << region.to_string();
            throw DesignSpaceError(os.str());
        }
        if (design.weight(i) > 0.0) m += design.weight(i) * model.unit_info(x);
    }
    return m;
}

} // namespace satdesign
