#include "satdesign/design.hpp"

#include "satdesign/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace satdesign {

namespace {

constexpr double kSumTolerance = 1e-8;

} // namespace

Design::Design(std::vector<double> points, std::vector<double> weights) {
    if (points.size() != weights.size()) throw DesignError("design needs one weight per point");
    if (points.empty()) throw DesignError("design has no points");

    for (double x : points) {
        if (!std::isfinite(x)) throw DesignError("design points must be finite");
    }

    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });

    double total = 0.0;
    for (std::size_t i : order) {
        const double x = points[i];
        const double w = weights[i];
        if (!(w >= 0.0) || !std::isfinite(w)) throw DesignError("design weights must be finite and nonnegative");
        total += w;
        if (!points_.empty() && points_.back() == x) {
            weights_.back() += w;
        } else {
            points_.push_back(x);
            weights_.push_back(w);
        }
    }
    if (std::abs(total - 1.0) > kSumTolerance) {
        std::ostringstream os;
        os << "design weights sum to " << total << ", expected 1";
        throw DesignError(os.str());
    }
    for (double& w : weights_) w /= total;
}

std::size_t Design::support_size(double tol) const {
    return static_cast<std::size_t>(std::count_if(weights_.begin(), weights_.end(), [tol](double w) { return w > tol; }));
}

Design Design::pruned(double tol) const {
    std::vector<double> x;
    std::vector<double> w;
    double total = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
        if (weights_[i] > tol) {
            x.push_back(points_[i]);
            w.push_back(weights_[i]);
            total += weights_[i];
        }
    }
    if (x.empty()) throw DesignError("pruning removed every point");
    for (double& v : w) v /= total;
    return Design(std::move(x), std::move(w));
}

double Design::distance(const Design& other) const {
    if (size() != other.size()) return std::numeric_limits<double>::infinity();
    double d = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
        d = std::max(d, std::abs(points_[i] - other.points_[i]));
        d = std::max(d, std::abs(weights_[i] - other.weights_[i]));
    }
    return d;
}

std::string Design::to_string(int precision) const {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(precision);
    os << '{';
    for (std::size_t i = 0; i < size(); ++i) {
        if (i) os << ", ";
        os << '(' << points_[i] << ", " << weights_[i] << ')';
    }
    os << '}';
    return os.str();
}

} // namespace satdesign
