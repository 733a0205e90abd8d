#pragma once

#include <lapacke.h>

#include <Eigen/Dense>
#include <stdexcept>

namespace srcdisc {

inline void require_symmetric(const Eigen::MatrixXd& m, double tol = 1e-10) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("matrix must be square");
  if (!m.allFinite())
    throw std::invalid_argument("matrix entries must be finite");
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > tol)
    throw std::invalid_argument("matrix must be symmetric");
}

/// Eigenvalues of a real symmetric matrix, ascending. Small problems go
/// through Eigen; larger ones through LAPACK dsyevd, which is much faster
/// once the tensor-power dimensions show up.
inline Eigen::VectorXd symmetric_eigenvalues(Eigen::MatrixXd m) {
  const auto n = static_cast<lapack_int>(m.rows());
  if (n <= 64) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
  }
  Eigen::VectorXd vals(n);
  const lapack_int info =
      LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', n, m.data(), n, vals.data());
  if (info != 0)
    throw std::runtime_error("LAPACKE_dsyevd failed with info=" + std::to_string(info));
  return vals;
}

/// Full eigen-decomposition (ascending values, orthonormal columns).
inline void symmetric_eigen(const Eigen::MatrixXd& m, Eigen::VectorXd& values,
                            Eigen::MatrixXd& vectors) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("symmetric eigendecomposition failed");
  values = es.eigenvalues();
  vectors = es.eigenvectors();
}

inline Eigen::MatrixXd kronecker(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace srcdisc
