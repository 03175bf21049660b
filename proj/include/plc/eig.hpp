#pragma once

#include <utility>

#include "plc/common.hpp"

namespace plc {

/// Smallest `count` eigenpairs of a dense symmetric matrix, eigenvalues
/// ascending, eigenvectors orthonormal columns.
inline std::pair<Vector, Matrix> eig_sym_smallest(const Matrix& m, int count) {
  const int n = static_cast<int>(m.rows());
  require(count >= 1 && count <= n, "eig_sym_smallest: count out of range");
  if (!is_symmetric(m, 1e-8)) {
    throw std::invalid_argument("eig_sym_smallest: matrix not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()));
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("eig_sym_smallest: eigensolver did not converge");
  }
  return {es.eigenvalues().head(count), es.eigenvectors().leftCols(count)};
}

}  // namespace plc
