#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace satdesign::cli {

json number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

json numbers(const std::vector<double>& xs) {
    json out = json::array();
    for (double x : xs) out.push_back(number(x));
    return out;
}

json numbers(const Vector& v) {
    return numbers(std::vector<double>(v.data(), v.data() + v.size()));
}

json matrix(const Matrix& m) {
    json out = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(numbers(Vector(m.row(i).transpose())));
    return out;
}

json design(const Design& d) {
    return json{{"points", numbers(std::vector<double>(d.points().begin(), d.points().end()))},
                {"weights", numbers(std::vector<double>(d.weights().begin(), d.weights().end()))}};
}

json region(const DesignSpace& r) {
    return json{{"L", number(r.lower())}, {"U", number(r.upper())}, {"closed_L", r.closed_lower()}, {"closed_U", r.closed_upper()}};
}

json model(const Model& m) {
    json out{{"name", m.name()}, {"theta", numbers(m.theta())}};
    if (const auto e = m.efficiency_function()) out["efficiency"] = e->label();
    const auto note = m.provenance();
    if (!note.empty()) out["provenance"] = note;
    return out;
}

json certificate(const EquivalenceCertificate& c) {
    return json{{"passed", c.passed},
                {"max_sensitivity", number(c.max_sensitivity)},
                {"max_sensitivity_violation", number(c.max_sensitivity_violation)},
                {"argmax", number(c.argmax)},
                {"support_residual", number(c.support_residual)},
                {"tolerance", number(c.tolerance)},
                {"scan_points", c.scan_points}};
}

json descriptor(const ClassDescriptor& d) {
    json out{{"case", to_string(d.which)},
             {"m", d.m},
             {"k", d.k},
             {"fix_lower", d.fix_lower},
             {"fix_upper", d.fix_upper},
             {"region", region(d.region)},
             {"c_transform", d.c_transform.label},
             {"psi", d.psi_labels},
             {"scale", number(d.scale)}};
    out["P"] = d.P ? matrix(*d.P) : json(nullptr);
    out["note"] = d.note;
    return out;
}

json chebyshev(const ChebyshevReport& c) {
    return json{{"verdict", c.verdict()},
                {"system_size", c.system_size},
                {"tuples_tested", c.tuples_tested},
                {"min_abs_determinant", number(c.min_abs_determinant)},
                {"min_normalized_determinant", number(c.min_normalized_determinant)},
                {"witness", numbers(c.witness)},
                {"reason", c.reason}};
}

json solve_report(const SolveReport& r) {
    return json{{"design", design(r.design)},
                {"criterion_value", number(r.criterion_value)},
                {"grad_norm", number(r.grad_norm)},
                {"feasible", r.feasible},
                {"boundary_fallback_used", r.boundary_fallback_used},
                {"multistart_agreement", number(r.multistart_agreement)},
                {"starts", r.starts},
                {"starts_converged", r.starts_converged},
                {"non_unique", r.non_unique},
                {"iterations", r.iterations},
                {"shape", json{{"m", r.m}, {"fix_lower", r.fix_lower}, {"fix_upper", r.fix_upper}}},
                {"equivalence_certificate", certificate(r.certificate)},
                {"message", r.message}};
}

json tagged(const std::string& kind, json body) {
    json out{{"kind", kind}};
    for (auto& [key, value] : body.items()) out[key] = std::move(value);
    return out;
}

std::string fixed(double x, int precision) {
    if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, x);
    return buf;
}

std::string sci(double x, int precision) {
    if (!std::isfinite(x)) return fixed(x);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*e", precision, x);
    return buf;
}

std::string text_table(const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> widths;
    for (const auto& row : rows) {
        if (widths.size() < row.size()) widths.resize(row.size(), 0);
        for (std::size_t j = 0; j < row.size(); ++j) widths[j] = std::max(widths[j], row[j].size());
    }
    std::ostringstream os;
    for (const auto& row : rows) {
        std::string line;
        for (std::size_t j = 0; j < row.size(); ++j) {
            line += row[j];
            if (j + 1 < row.size()) line += std::string(widths[j] - row[j].size() + 2, ' ');
        }
        os << line << '\n';
    }
    return os.str();
}

std::string design_table(const Design& d, int precision) {
    std::vector<std::string> points{"points"};
    std::vector<std::string> weights{"weights"};
    for (std::size_t i = 0; i < d.size(); ++i) {
        points.push_back(fixed(d.point(i), precision));
        weights.push_back(fixed(d.weight(i), precision));
    }
    return text_table({points, weights});
}

} // namespace satdesign::cli
