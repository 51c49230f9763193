#pragma once

#include <string>
#include <vector>

namespace satdesign::cli {

// Published optimal designs, as printed (three decimals). Reference set N
// matches `reproduce-table N`.

struct ReferenceRow {
    std::string label;
    std::vector<double> theta;
    std::vector<double> points;
    std::vector<double> weights;
    std::vector<double> efficiencies;   // reference set 6 only
};

struct ReferenceTable {
    int id = 0;
    std::string title;
    std::string model;
    std::string criterion;   // "A", "e2" or "compound(p', ...)", per row when mixed
    double lower = 0.0;
    double upper = 0.0;
    double design_tolerance = 1e-3;
    double efficiency_tolerance = 2e-3;
    std::vector<ReferenceRow> rows;
};

// Reference set 3: magnitudes of the ε-design errors, one row per (p, ε).
struct EpsilonReferenceRow {
    double p = 0.0;
    double epsilon = 0.0;
    double point_error = 0.0;    // |x2 - 25/6| / (25/6)
    double weight1 = 0.0;        // |ω1|
    double weight2_error = 0.0;  // |ω2 - 1/2|
    double weight3_error = 0.0;  // |ω3 - 1/2|
    double inefficiency = 0.0;   // 1 - c-efficiency
};

struct EpsilonReferenceTable {
    std::string title;
    std::vector<double> theta;   // Emax
    std::vector<double> a;
    double lower = 0.0;
    double upper = 0.0;
    std::vector<double> limit_points;
    std::vector<EpsilonReferenceRow> rows;
};

/// Reference sets 1, 2, 4, 5 and 6. Throws std::out_of_range for others.
const ReferenceTable& reference_table(int id);
const EpsilonReferenceTable& epsilon_reference_table();

} // namespace satdesign::cli
