#pragma once
// Independent reference computations used only by tests.

#include <cmath>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "curldiv/assembly.hpp"

namespace oracle {

/// 1D Q1 stiffness and mass on m interior nodes (Dirichlet).
inline Eigen::MatrixXd stiffness_1d(int m, double h) {
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    K(i, i) = 2.0 / h;
    if (i + 1 < m) K(i, i + 1) = K(i + 1, i) = -1.0 / h;
  }
  return K;
}

inline Eigen::MatrixXd mass_1d(int m, double h) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    M(i, i) = 4.0 * h / 6.0;
    if (i + 1 < m) M(i, i + 1) = M(i + 1, i) = h / 6.0;
  }
  return M;
}

/// Scalar Q1 Laplacian on the interior nodes of an n^3 box, x-fastest ordering,
/// built as a sum of Kronecker products.
inline Eigen::MatrixXd tensor_laplacian(int n, double h) {
  const int m = n - 1;
  const Eigen::MatrixXd K = stiffness_1d(m, h), M = mass_1d(m, h);
  using Eigen::kroneckerProduct;
  Eigen::MatrixXd KMM = kroneckerProduct(M, Eigen::MatrixXd(kroneckerProduct(M, K)));
  Eigen::MatrixXd MKM = kroneckerProduct(M, Eigen::MatrixXd(kroneckerProduct(K, M)));
  Eigen::MatrixXd MMK = kroneckerProduct(K, Eigen::MatrixXd(kroneckerProduct(M, M)));
  return KMM + MKM + MMK;
}

inline Eigen::MatrixXd tensor_mass(int n, double h) {
  const Eigen::MatrixXd M = mass_1d(n - 1, h);
  using Eigen::kroneckerProduct;
  return kroneckerProduct(M, Eigen::MatrixXd(kroneckerProduct(M, M)));
}

/// Scalar matrix lifted to interleaved 3-component DOFs.
inline Eigen::MatrixXd vectorize(const Eigen::MatrixXd& S) {
  return Eigen::kroneckerProduct(S, Eigen::MatrixXd::Identity(3, 3));
}

inline Eigen::MatrixXd dense(const curldiv::SparseMatrix& A) { return Eigen::MatrixXd(A); }

inline double rel_l2(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (a - b).norm() / b.norm(); }

}  // namespace oracle
