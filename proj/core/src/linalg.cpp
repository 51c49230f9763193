#include "satdesign/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace satdesign::linalg {

Matrix symmetrize(const Matrix& m) {
    return 0.5 * (m + m.transpose());
}

SymmetricEigen symmetric_eigen(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrize(m));
    return {solver.eigenvalues(), solver.eigenvectors()};
}

double min_eigenvalue(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrize(m), Eigen::EigenvaluesOnly);
    return solver.eigenvalues()(0);
}

double inner(const Matrix& a, const Matrix& b) {
    return (a.array() * b.array()).sum();
}

Matrix spd_power(const Matrix& m, double q) {
    auto eig = symmetric_eigen(m);
    Vector powered = eig.values.unaryExpr([q](double v) { return std::pow(v, q); });
    return eig.vectors * powered.asDiagonal() * eig.vectors.transpose();
}

Matrix pseudo_inverse(const Matrix& m, double rel_cutoff) {
    auto eig = symmetric_eigen(m);
    const double top = std::max(std::abs(eig.values.maxCoeff()), std::abs(eig.values.minCoeff()));
    const double cutoff = rel_cutoff * top;
    Vector inv(eig.values.size());
    for (Eigen::Index i = 0; i < inv.size(); ++i) {
        inv(i) = eig.values(i) > cutoff ? 1.0 / eig.values(i) : 0.0;
    }
    return eig.vectors * inv.asDiagonal() * eig.vectors.transpose();
}

bool is_positive_definite(const Matrix& m, double rel_cutoff) {
    if (m.size() == 0) return false;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrize(m), Eigen::EigenvaluesOnly);
    const auto& v = solver.eigenvalues();
    const double top = v(v.size() - 1);
    return top > 0.0 && v(0) > rel_cutoff * top;
}

} // namespace satdesign::linalg
