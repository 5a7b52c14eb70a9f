#pragma once

#include <Eigen/Dense>

namespace rscc {

struct EigenDecomposition {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // column i pairs with values[i]
};

/// Eigen-decomposition of a symmetric matrix, eigenvalues in descending
/// order. Throws when |A - A^T| exceeds 1e-10 * max(1, max|A|).
EigenDecomposition symmetric_eig(const Eigen::MatrixXd& a);

/// Solves A v = lambda B v for symmetric A and symmetric positive definite B
/// through the Cholesky factor of B. Eigenvectors are B-orthonormal,
/// eigenvalues descending. Throws if B is not positive definite.
EigenDecomposition generalized_symmetric_eig(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Flips each column so that its largest-magnitude entry is positive
/// (first such entry on ties).
void canonicalize_signs(Eigen::MatrixXd& columns);

struct NnlsOptions {
  int max_iter = 0;  // 0 selects 30 * number of unknowns
  double tol = 1e-12;
};

/// argmin_{z >= 0} || c - V^T z ||_2 for V of shape k x d (rows are basis
/// spectra) using the Lawson-Hanson active-set method. Throws
/// std::runtime_error when the iteration cap is reached.
Eigen::VectorXd nnls(const Eigen::MatrixXd& v, const Eigen::VectorXd& c, const NnlsOptions& opts = {});

}  // namespace rscc
