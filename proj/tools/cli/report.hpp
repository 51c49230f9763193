#pragma once

#include "spec.hpp"

#include <string>
#include <vector>

namespace satdesign::cli {

// JSON pieces shared by every report. Non-finite numbers are written as the
// strings "inf", "-inf" and "nan" so the output stays valid JSON.
json number(double x);
json numbers(const std::vector<double>& xs);
json numbers(const Vector& v);
json matrix(const Matrix& m);
json design(const Design& d);
json region(const DesignSpace& r);
json model(const Model& m);
json certificate(const EquivalenceCertificate& c);
json descriptor(const ClassDescriptor& d);
json chebyshev(const ChebyshevReport& c);
json solve_report(const SolveReport& r);

/// Wraps a report body with its "kind" discriminator first.
json tagged(const std::string& kind, json body);

/// Aligned text rendering of a design: a points row and a weights row.
std::string design_table(const Design& d, int precision = 5);

/// Left-aligned columns, widths fitted to the longest cell.
std::string text_table(const std::vector<std::vector<std::string>>& rows);

std::string fixed(double x, int precision = 5);
std::string sci(double x, int precision = 2);

} // namespace satdesign::cli
