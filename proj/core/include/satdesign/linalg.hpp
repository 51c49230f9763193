#pragma once

#include <Eigen/Dense>

namespace satdesign {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace linalg {

struct SymmetricEigen {
    Vector values;   // ascending
    Matrix vectors;  // columns
};

Matrix symmetrize(const Matrix& m);

SymmetricEigen symmetric_eigen(const Matrix& m);

double min_eigenvalue(const Matrix& m);

/// Frobenius inner product trace(AᵀB).
double inner(const Matrix& a, const Matrix& b);

/// m^q for a symmetric positive definite m, via its eigendecomposition.
Matrix spd_power(const Matrix& m, double q);

/// Symmetric pseudo-inverse; eigenvalues at or below rel_cutoff·λ_max are treated as zero.
Matrix pseudo_inverse(const Matrix& m, double rel_cutoff = 1e-12);

/// True when the eigenvalues of m exceed rel_cutoff·λ_max.
bool is_positive_definite(const Matrix& m, double rel_cutoff = 1e-12);

} // namespace linalg
} // namespace satdesign
