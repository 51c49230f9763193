#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace satdesign {

/// Approximate design: strictly increasing points with nonnegative weights
/// summing to one. The constructor sorts the pairs and merges duplicate
/// points by summing their weights.
class Design {
public:
    Design() = default;
    Design(std::vector<double> points, std::vector<double> weights);

    std::span<const double> points() const { return points_; }
    std::span<const double> weights() const { return weights_; }
    double point(std::size_t i) const { return points_[i]; }
    double weight(std::size_t i) const { return weights_[i]; }
    std::size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }

    /// Number of points whose weight exceeds tol.
    std::size_t support_size(double tol = 0.0) const;

    /// Copy without the points whose weight is at or below tol, renormalized.
    Design pruned(double tol) const;

    /// Sup-norm distance over points and weights; infinite when sizes differ.
    double distance(const Design& other) const;

    std::string to_string(int precision = 4) const;

private:
    std::vector<double> points_;
    std::vector<double> weights_;
};

} // namespace satdesign
