#pragma once

#include "satdesign/satdesign.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace satdesign::cli {

using json = nlohmann::ordered_json;

enum class Mode { solve, classify, verify, oracle, epsilon_c, bench, reproduce_table };

std::string to_string(Mode mode);
std::optional<Mode> mode_from_string(const std::string& text);

/// Input error with a location: "line N, column M" for syntax errors and
/// "field 'a.b'" (plus the line of the key when it can be found) otherwise.
class SpecError : public Error {
public:
    using Error::Error;
};

struct EfficiencyLiteral {
    std::string kind;   // constant, 1-x, 1+x, exp(-x), jacobi, laguerre, gauss, cauchy
    double u = 0.0;
    double v = 0.0;
    double t = 0.0;
    friend bool operator==(const EfficiencyLiteral&, const EfficiencyLiteral&) = default;
};

struct ModelLiteral {
    std::string name;
    std::vector<double> theta;
    std::optional<EfficiencyLiteral> efficiency;
    friend bool operator==(const ModelLiteral&, const ModelLiteral&) = default;
};

struct RegionLiteral {
    double lower = 0.0;
    double upper = 0.0;
    std::optional<bool> closed_lower;
    std::optional<bool> closed_upper;
    friend bool operator==(const RegionLiteral&, const RegionLiteral&) = default;
};

struct TransformLiteral {
    std::string kind;   // identity, matrix, c, epsilon (written as "identity", {"K"}, {"a"}, {"a","epsilon"})
    std::vector<std::vector<double>> K;
    std::vector<double> a;
    double epsilon = 0.0;
    friend bool operator==(const TransformLiteral&, const TransformLiteral&) = default;
};

struct CriterionLiteral {
    std::string kind;   // D, A, phi_p, c, e, compound
    std::optional<double> p;
    std::optional<TransformLiteral> transform;
    std::vector<double> a;
    std::optional<std::size_t> index;
    std::optional<double> inner_p;   // compound "p"
    std::optional<double> outer_p;   // compound "p_prime"
    std::vector<double> beta;        // empty means "uniform"
    friend bool operator==(const CriterionLiteral&, const CriterionLiteral&) = default;
};

struct DesignLiteral {
    std::vector<double> points;
    std::vector<double> weights;
    friend bool operator==(const DesignLiteral&, const DesignLiteral&) = default;
};

struct OptionsLiteral {
    std::optional<int> max_iter;
    std::optional<double> grad_tol;
    std::optional<int> multistart;
    std::optional<std::uint64_t> seed;
    std::optional<std::vector<double>> epsilon_schedule;
    std::optional<bool> certify;
    std::optional<std::size_t> scan_resolution;
    std::optional<double> sensitivity_tol;
    std::optional<DesignLiteral> initial_design;
    friend bool operator==(const OptionsLiteral&, const OptionsLiteral&) = default;
};

struct OracleLiteral {
    std::string method;   // closed_form, owea, reduce
    std::optional<std::string> tag;
    std::optional<std::size_t> kappa;
    std::optional<std::size_t> coarse;
    std::optional<std::size_t> refine_radius;
    friend bool operator==(const OracleLiteral&, const OracleLiteral&) = default;
};

struct EpsilonLiteral {
    std::vector<double> a;
    double p = -1.0;
    friend bool operator==(const EpsilonLiteral&, const EpsilonLiteral&) = default;
};

struct ProblemSpec {
    std::optional<Mode> mode;
    std::optional<ModelLiteral> model;
    std::optional<RegionLiteral> region;
    std::optional<CriterionLiteral> criterion;
    std::optional<OptionsLiteral> options;
    std::optional<DesignLiteral> design;
    std::optional<OracleLiteral> oracle;
    std::optional<EpsilonLiteral> epsilon_c;
    std::optional<int> table;
    friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;
};

/// Parses a spec document. Numbers may be written as JSON numbers or as
/// strings holding a decimal, a fraction ("7/15") or "inf"/"-inf".
ProblemSpec parse_spec(const std::string& text);
ProblemSpec load_spec(const std::string& path);
json to_json(const ProblemSpec& spec);

/// Reads a number literal as accepted by the parser.
std::optional<double> parse_number(const std::string& text);

ModelPtr build_model(const ModelLiteral& literal);
DesignSpace build_region(const RegionLiteral& literal);
CriterionSpec build_criterion(const CriterionLiteral& literal, std::size_t d);
Design build_design(const DesignLiteral& literal);
SolveOptions build_options(const std::optional<OptionsLiteral>& literal);

} // namespace satdesign::cli
