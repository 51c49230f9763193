#include "satdesign/design_space.hpp"

#include "satdesign/errors.hpp"

#include <cmath>
#include <sstream>

namespace satdesign {

DesignSpace::DesignSpace(double lower, double upper, bool closed_lower, bool closed_upper)
    : lower_(lower), upper_(upper), closed_lower_(closed_lower), closed_upper_(closed_upper) {
    if (std::isnan(lower) || std::isnan(upper)) throw DesignSpaceError("design space endpoint is NaN");
    if (!(lower < upper)) {
        std::ostringstream os;
        os << "design space requires lower < upper, got [" << lower << ", " << upper << "]";
        throw DesignSpaceError(os.str());
    }
    if (std::isinf(lower_)) closed_lower_ = false;
    if (std::isinf(upper_)) closed_upper_ = false;
}

bool DesignSpace::lower_finite() const { return std::isfinite(lower_); }
bool DesignSpace::upper_finite() const { return std::isfinite(upper_); }

double DesignSpace::finite_lower() const {
    if (!lower_finite()) throw DesignSpaceError("operation requires a finite lower endpoint, region is " + to_string());
    return lower_;
}

double DesignSpace::finite_upper() const {
    if (!upper_finite()) throw DesignSpaceError("operation requires a finite upper endpoint, region is " + to_string());
    return upper_;
}

bool DesignSpace::contains(double x) const {
    if (std::isnan(x)) return false;
    const bool above = closed_lower_ ? x >= lower_ : x > lower_;
    const bool below = closed_upper_ ? x <= upper_ : x < upper_;
    return above && below;
}

bool DesignSpace::contains(const DesignSpace& other) const {
    const bool lower_ok = other.lower_ > lower_ || (other.lower_ == lower_ && (closed_lower_ || !other.closed_lower_));
    const bool upper_ok = other.upper_ < upper_ || (other.upper_ == upper_ && (closed_upper_ || !other.closed_upper_));
    return lower_ok && upper_ok;
}

std::string DesignSpace::to_string() const {
    std::ostringstream os;
    os.precision(10);
    os << (closed_lower_ ? '[' : '(');
    if (lower_finite()) os << lower_; else os << "-inf";
    os << ", ";
    if (upper_finite()) os << upper_; else os << "inf";
    os << (closed_upper_ ? ']' : ')');
    return os.str();
}

} // namespace satdesign
