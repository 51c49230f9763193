#pragma once

#include <limits>
#include <string>

namespace satdesign {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// An interval [L, U] of the extended real line. Infinite endpoints are kept
/// explicitly and are never closed.
class DesignSpace {
public:
    DesignSpace(double lower, double upper, bool closed_lower = true, bool closed_upper = true);

    static DesignSpace closed(double lower, double upper) { return {lower, upper, true, true}; }
    static DesignSpace real_line() { return {-kInfinity, kInfinity}; }

    double lower() const { return lower_; }
    double upper() const { return upper_; }
    bool closed_lower() const { return closed_lower_; }
    bool closed_upper() const { return closed_upper_; }
    bool lower_finite() const;
    bool upper_finite() const;
    bool bounded() const { return lower_finite() && upper_finite(); }

    /// Endpoint accessors for operations that need a finite value; they throw
    /// DesignSpaceError on an infinite endpoint.
    double finite_lower() const;
    double finite_upper() const;

    bool contains(double x) const;
    bool contains(const DesignSpace& other) const;

    std::string to_string() const;

    friend bool operator==(const DesignSpace&, const DesignSpace&) = default;

private:
    double lower_;
    double upper_;
    bool closed_lower_;
    bool closed_upper_;
};

} // namespace satdesign
