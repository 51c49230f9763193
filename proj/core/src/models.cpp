#include "satdesign/errors.hpp"
#include "satdesign/model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace satdesign {

namespace {

void require_size(std::string_view model, const Vector& theta, Eigen::Index n) {
    if (theta.size() != n) {
        std::ostringstream os;
        os << model << " expects " << n << " parameters, got " << theta.size();
        throw ParameterError(os.str());
    }
}

void require(bool ok, std::string_view model, std::string_view constraint) {
    if (!ok) throw ParameterError(std::string(model) + ": parameter constraint violated: " + std::string(constraint));
}

void require_finite(std::string_view model, const Vector& theta) {
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        if (!std::isfinite(theta(i))) throw ParameterError(std::string(model) + ": parameters must be finite");
    }
}

Vector vec(std::initializer_list<double> values) {
    Vector v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v(i++) = x;
    return v;
}

const DesignSpace kNonnegative{0.0, kInfinity};

class PoissonModel final : public Model {
public:
    explicit PoissonModel(Vector theta) : Model("poisson", std::move(theta), DesignSpace::real_line()) {}
    ModelKind kind() const override { return ModelKind::poisson; }
    double mean(double x) const override { return theta()(0) + theta()(1) * x; }
    Vector gradient(double x) const override { return vec({1.0, x}); }
    Vector gradient_dx(double) const override { return vec({0.0, 1.0}); }
    double weight(double x) const override { return std::exp(mean(x)); }
    double weight_dx(double x) const override { return theta()(1) * std::exp(mean(x)); }
    double scale() const override { return 1.0 / std::abs(theta()(1)); }
};

class LogisticModel final : public Model {
public:
    explicit LogisticModel(Vector theta) : Model("logistic", std::move(theta), DesignSpace::real_line()) {}
    ModelKind kind() const override { return ModelKind::logistic; }
    double mean(double x) const override { return theta()(0) + theta()(1) * x; }
    Vector gradient(double x) const override { return vec({1.0, x}); }
    Vector gradient_dx(double) const override { return vec({0.0, 1.0}); }
    double weight(double x) const override {
        const double e = std::exp(-std::abs(mean(x)));
        return e / ((1.0 + e) * (1.0 + e));
    }
    double weight_dx(double x) const override {
        const double eta = mean(x);
        const double p = 1.0 / (1.0 + std::exp(-eta));
        return weight(x) * (1.0 - 2.0 * p) * theta()(1);
    }
    double center() const override { return -theta()(0) / theta()(1); }
    double scale() const override { return 1.0 / std::abs(theta()(1)); }
    std::string provenance() const override { return "GLM weight e^eta/(1+e^eta)^2 from standard GLM theory"; }
};

class ProbitModel final : public Model {
public:
    explicit ProbitModel(Vector theta) : Model("probit", std::move(theta), DesignSpace::real_line()) {}
    ModelKind kind() const override { return ModelKind::probit; }
    double mean(double x) const override { return theta()(0) + theta()(1) * x; }
    Vector gradient(double x) const override { return vec({1.0, x}); }
    Vector gradient_dx(double) const override { return vec({0.0, 1.0}); }
    double weight(double x) const override {
        const double eta = std::abs(mean(x));
        const double phi = std::exp(-0.5 * eta * eta) / std::sqrt(2.0 * std::numbers::pi);
        const double tail = 0.5 * std::erfc(eta / std::numbers::sqrt2);
        const double denom = tail * (1.0 - tail);
        return denom > 0.0 ? phi * phi / denom : 0.0;
    }
    double center() const override { return -theta()(0) / theta()(1); }
    double scale() const override { return 1.0 / std::abs(theta()(1)); }
    std::string provenance() const override {
        return "GLM weight phi(eta)^2/(Phi(eta)(1-Phi(eta))) from standard GLM theory";
    }
};

class MichaelisMentenModel final : public Model {
public:
    explicit MichaelisMentenModel(Vector theta) : Model("michaelis_menten", std::move(theta), kNonnegative) {}
    ModelKind kind() const override { return ModelKind::michaelis_menten; }
    double mean(double x) const override { return theta()(0) * x / (theta()(1) + x); }
    Vector gradient(double x) const override {
        const double s = theta()(1) + x;
        return vec({x / s, -theta()(0) * x / (s * s)});
    }
    Vector gradient_dx(double x) const override {
        const double s = theta()(1) + x;
        return vec({theta()(1) / (s * s), -theta()(0) * (theta()(1) - x) / (s * s * s)});
    }
    double scale() const override { return theta()(1); }
    std::string provenance() const override {
        return "mean theta1*x/(theta2+x) and two-point class including U from external two-parameter results";
    }
};

class EmaxModel final : public Model {
public:
    explicit EmaxModel(Vector theta) : Model("emax", std::move(theta), kNonnegative) {}
    ModelKind kind() const override { return ModelKind::emax; }
    double mean(double x) const override { return theta()(0) + theta()(1) * x / (x + theta()(2)); }
    Vector gradient(double x) const override {
        const double s = x + theta()(2);
        return vec({1.0, x / s, -theta()(1) * x / (s * s)});
    }
    Vector gradient_dx(double x) const override {
        const double s = x + theta()(2);
        return vec({0.0, theta()(2) / (s * s), -theta()(1) * (theta()(2) - x) / (s * s * s)});
    }
    double scale() const override { return theta()(2); }
};

class LogLinearModel final : public Model {
public:
    explicit LogLinearModel(Vector theta) : Model("log_linear", std::move(theta), kNonnegative) {}
    ModelKind kind() const override { return ModelKind::log_linear; }
    double mean(double x) const override { return theta()(0) + theta()(1) * std::log(x + theta()(2)); }
    Vector gradient(double x) const override {
        const double s = x + theta()(2);
        return vec({1.0, std::log(s), theta()(1) / s});
    }
    Vector gradient_dx(double x) const override {
        const double s = x + theta()(2);
        return vec({0.0, 1.0 / s, -theta()(1) / (s * s)});
    }
    double scale() const override { return theta()(2); }
};

class LinexpModel final : public Model {
public:
    explicit LinexpModel(Vector theta) : Model("linexp", std::move(theta), kNonnegative) {}
    ModelKind kind() const override { return ModelKind::linexp; }
    double mean(double x) const override {
        return theta()(0) + theta()(1) * std::exp(theta()(2) * x) + theta()(3) * x;
    }
    Vector gradient(double x) const override {
        const double e = std::exp(theta()(2) * x);
        return vec({1.0, e, theta()(1) * x * e, x});
    }
    Vector gradient_dx(double x) const override {
        const double t3 = theta()(2);
        const double e = std::exp(t3 * x);
        return vec({0.0, t3 * e, theta()(1) * e * (1.0 + t3 * x), 1.0});
    }
    double scale() const override { return 1.0 / std::abs(theta()(2)); }
};

class DoubleExponentialModel final : public Model {
public:
    explicit DoubleExponentialModel(Vector theta) : Model("double_exponential", std::move(theta), kNonnegative) {}
    ModelKind kind() const override { return ModelKind::double_exponential; }
    double mean(double x) const override {
        const auto& t = theta();
        return t(0) + std::log(t(1) * std::exp(t(2) * x) + (1.0 - t(1)) * std::exp(-t(3) * x));
    }
    Vector gradient(double x) const override {
        const auto& t = theta();
        const double up = std::exp(t(2) * x);
        const double down = std::exp(-t(3) * x);
        const double s = t(1) * up + (1.0 - t(1)) * down;
        return vec({1.0, (up - down) / s, t(1) * x * up / s, -(1.0 - t(1)) * x * down / s});
    }
    double scale() const override { return 1.0 / std::max(theta()(2), theta()(3)); }
};

class ExponentialModel final : public Model {
public:
    explicit ExponentialModel(Vector theta) : Model("exponential", std::move(theta), kNonnegative) {}
    ModelKind kind() const override { return ModelKind::exponential; }
    std::size_t terms() const { return dim() / 2; }
    double mean(double x) const override {
        double eta = 0.0;
        for (std::size_t s = 0; s < terms(); ++s) eta += coef(s) * std::exp(-rate(s) * x);
        return eta;
    }
    Vector gradient(double x) const override {
        Vector f(static_cast<Eigen::Index>(dim()));
        for (std::size_t s = 0; s < terms(); ++s) {
            const double e = std::exp(-rate(s) * x);
            f(static_cast<Eigen::Index>(2 * s)) = e;
            f(static_cast<Eigen::Index>(2 * s + 1)) = -coef(s) * x * e;
        }
        return f;
    }
    Vector gradient_dx(double x) const override {
        Vector f(static_cast<Eigen::Index>(dim()));
        for (std::size_t s = 0; s < terms(); ++s) {
            const double e = std::exp(-rate(s) * x);
            f(static_cast<Eigen::Index>(2 * s)) = -rate(s) * e;
            f(static_cast<Eigen::Index>(2 * s + 1)) = -coef(s) * e * (1.0 - rate(s) * x);
        }
        return f;
    }
    double scale() const override { return 1.0 / rate(0); }

private:
    double coef(std::size_t s) const { return theta()(static_cast<Eigen::Index>(2 * s)); }
    double rate(std::size_t s) const { return theta()(static_cast<Eigen::Index>(2 * s + 1)); }
};

class PolynomialModel final : public Model {
public:
    PolynomialModel(Vector theta, EfficiencyFunction lambda)
        : Model("polynomial", std::move(theta), lambda.full_region()), lambda_(lambda) {}
    ModelKind kind() const override { return ModelKind::polynomial; }
    double mean(double x) const override {
        double eta = 0.0;
        for (Eigen::Index i = theta().size() - 1; i >= 0; --i) eta = eta * x + theta()(i);
        return eta;
    }
    Vector gradient(double x) const override {
        Vector f(static_cast<Eigen::Index>(dim()));
        double power = 1.0;
        for (Eigen::Index i = 0; i < f.size(); ++i) {
            f(i) = power;
            power *= x;
        }
        return f;
    }
    Vector gradient_dx(double x) const override {
        Vector f(static_cast<Eigen::Index>(dim()));
        f(0) = 0.0;
        double power = 1.0;
        for (Eigen::Index i = 1; i < f.size(); ++i) {
            f(i) = static_cast<double>(i) * power;
            power *= x;
        }
        return f;
    }
    double weight(double x) const override { return lambda_(x); }
    double weight_dx(double x) const override { return lambda_.derivative(x); }
    std::shared_ptr<const Model> nested(std::size_t d) const override {
        if (d < 2 || d > dim()) throw ParameterError("nested polynomial dimension must lie in [2, d]");
        return std::make_shared<PolynomialModel>(theta().head(static_cast<Eigen::Index>(d)), lambda_);
    }
    std::optional<EfficiencyFunction> efficiency_function() const override { return lambda_; }

private:
    EfficiencyFunction lambda_;
};

void validate_efficiency(const EfficiencyFunction& lambda) {
    using Kind = EfficiencyFunction::Kind;
    if (lambda.kind == Kind::jacobi) {
        require(lambda.u + 1.0 > 0.0, "polynomial", "jacobi efficiency needs u+1 > 0");
        require(lambda.v + 1.0 > 0.0, "polynomial", "jacobi efficiency needs v+1 > 0");
    }
    if (lambda.kind == Kind::laguerre) require(lambda.u + 1.0 > 0.0, "polynomial", "laguerre efficiency needs u+1 > 0");
    if (lambda.kind == Kind::cauchy) require(lambda.t > 0.0, "polynomial", "cauchy efficiency needs t > 0");
}

} // namespace

ModelPtr make_poisson(double theta1, double theta2) {
    Vector t = vec({theta1, theta2});
    require_finite("poisson", t);
    require(theta2 != 0.0, "poisson", "theta2 != 0");
    return std::make_shared<PoissonModel>(t);
}

ModelPtr make_logistic(double theta1, double theta2) {
    Vector t = vec({theta1, theta2});
    require_finite("logistic", t);
    require(theta2 != 0.0, "logistic", "theta2 != 0");
    return std::make_shared<LogisticModel>(t);
}

ModelPtr make_probit(double theta1, double theta2) {
    Vector t = vec({theta1, theta2});
    require_finite("probit", t);
    require(theta2 != 0.0, "probit", "theta2 != 0");
    return std::make_shared<ProbitModel>(t);
}

ModelPtr make_michaelis_menten(double theta1, double theta2) {
    Vector t = vec({theta1, theta2});
    require_finite("michaelis_menten", t);
    require(theta1 != 0.0, "michaelis_menten", "theta1 != 0");
    require(theta2 > 0.0, "michaelis_menten", "theta2 > 0");
    return std::make_shared<MichaelisMentenModel>(t);
}

ModelPtr make_emax(double theta1, double theta2, double theta3) {
    Vector t = vec({theta1, theta2, theta3});
    require_finite("emax", t);
    require(theta2 > 0.0, "emax", "theta2 > 0");
    require(theta3 > 0.0, "emax", "theta3 > 0");
    return std::make_shared<EmaxModel>(t);
}

ModelPtr make_log_linear(double theta1, double theta2, double theta3) {
    Vector t = vec({theta1, theta2, theta3});
    require_finite("log_linear", t);
    require(theta2 > 0.0, "log_linear", "theta2 > 0");
    require(theta3 > 0.0, "log_linear", "theta3 > 0");
    return std::make_shared<LogLinearModel>(t);
}

ModelPtr make_linexp(double theta1, double theta2, double theta3, double theta4) {
    Vector t = vec({theta1, theta2, theta3, theta4});
    require_finite("linexp", t);
    require(theta2 != 0.0, "linexp", "theta2 != 0");
    require(theta3 < 0.0, "linexp", "theta3 < 0");
    return std::make_shared<LinexpModel>(t);
}

ModelPtr make_double_exponential(double theta1, double theta2, double theta3, double theta4) {
    Vector t = vec({theta1, theta2, theta3, theta4});
    require_finite("double_exponential", t);
    require(theta2 > 0.0 && theta2 < 1.0, "double_exponential", "0 < theta2 < 1");
    require(theta3 > 0.0, "double_exponential", "theta3 > 0");
    require(theta4 > 0.0, "double_exponential", "theta4 > 0");
    return std::make_shared<DoubleExponentialModel>(t);
}

ModelPtr make_exponential(const Vector& theta) {
    require_finite("exponential", theta);
    if (theta.size() < 2 || theta.size() % 2 != 0) {
        throw ParameterError("exponential expects 2S parameters (S >= 1), got " + std::to_string(theta.size()));
    }
    double previous_rate = 0.0;
    for (Eigen::Index s = 0; s < theta.size() / 2; ++s) {
        const std::string idx = std::to_string(2 * s + 1);
        const std::string rate_idx = std::to_string(2 * s + 2);
        require(theta(2 * s) != 0.0, "exponential", "theta" + idx + " != 0");
        require(theta(2 * s + 1) > previous_rate, "exponential",
                s == 0 ? "0 < theta2" : "theta" + std::to_string(2 * s) + " < theta" + rate_idx);
        previous_rate = theta(2 * s + 1);
    }
    return std::make_shared<ExponentialModel>(theta);
}

ModelPtr make_polynomial(std::size_t dim, EfficiencyFunction efficiency, Vector theta) {
    if (dim < 2) throw ParameterError("polynomial: parameter constraint violated: d >= 2");
    if (theta.size() == 0) theta = Vector::Zero(static_cast<Eigen::Index>(dim));
    require_size("polynomial", theta, static_cast<Eigen::Index>(dim));
    require_finite("polynomial", theta);
    validate_efficiency(efficiency);
    return std::make_shared<PolynomialModel>(std::move(theta), efficiency);
}

ModelRegistry register_builtin_models() {
    ModelRegistry r;
    r.add("poisson", "Poisson regression, log E(y) = theta1 + theta2 x",
          [](const Vector& t, const ModelOptions&) {
              require_size("poisson", t, 2);
              return make_poisson(t(0), t(1));
          });
    r.add("logistic", "logistic regression, logit p = theta1 + theta2 x",
          [](const Vector& t, const ModelOptions&) {
              require_size("logistic", t, 2);
              return make_logistic(t(0), t(1));
          });
    r.add("probit", "probit regression, Phi^-1(p) = theta1 + theta2 x",
          [](const Vector& t, const ModelOptions&) {
              require_size("probit", t, 2);
              return make_probit(t(0), t(1));
          });
    r.add("michaelis_menten", "Michaelis-Menten, eta = theta1 x / (theta2 + x)",
          [](const Vector& t, const ModelOptions&) {
              require_size("michaelis_menten", t, 2);
              return make_michaelis_menten(t(0), t(1));
          });
    r.add("emax", "Emax, eta = theta1 + theta2 x / (x + theta3)",
          [](const Vector& t, const ModelOptions&) {
              require_size("emax", t, 3);
              return make_emax(t(0), t(1), t(2));
          });
    r.add("log_linear", "log-linear, eta = theta1 + theta2 log(x + theta3)",
          [](const Vector& t, const ModelOptions&) {
              require_size("log_linear", t, 3);
              return make_log_linear(t(0), t(1), t(2));
          });
    r.add("linexp", "LINEXP, eta = theta1 + theta2 exp(theta3 x) + theta4 x",
          [](const Vector& t, const ModelOptions&) {
              require_size("linexp", t, 4);
              return make_linexp(t(0), t(1), t(2), t(3));
          });
    r.add("double_exponential", "double exponential, eta = theta1 + log(theta2 e^{theta3 x} + (1-theta2) e^{-theta4 x})",
          [](const Vector& t, const ModelOptions&) {
              require_size("double_exponential", t, 4);
              return make_double_exponential(t(0), t(1), t(2), t(3));
          });
    r.add("exponential", "exponential regression, eta = sum_s theta_{2s-1} exp(-theta_{2s} x)",
          [](const Vector& t, const ModelOptions&) { return make_exponential(t); });
    r.add("polynomial", "polynomial of degree d-1 with efficiency function lambda(x)",
          [](const Vector& t, const ModelOptions& o) {
              return make_polynomial(static_cast<std::size_t>(t.size()), o.efficiency.value_or(EfficiencyFunction{}), t);
          });
    return r;
}

} // namespace satdesign
