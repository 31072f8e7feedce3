#pragma once

#include <Eigen/Dense>

namespace mckle {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

// Smallest eigenvalue of a symmetric matrix.
inline double min_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// Positive definiteness with the eigenvalue floor tol * trace.
inline bool is_positive_definite(const Matrix& m, double rel_floor = 1e-10) {
  const double tr = m.trace();
  if (!(tr > 0.0)) return false;
  return min_eigenvalue(m) > rel_floor * tr;
}

}  // namespace mckle
