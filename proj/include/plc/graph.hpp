#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "plc/common.hpp"
#include "plc/qp.hpp"

namespace plc {

struct NeighborSet {
  int k = 0;
  std::vector<std::vector<int>> neighbors;  // neighbors[j] = k nearest rows to j
};

struct WeightGraph {
  NeighborSet neighbor_set;
  Matrix W;  // n x n, column j supported on neighbors[j], column sums 1
};

struct LaplacianPair {
  Matrix A;  // diagonal, A_ii = row sum of W
  Matrix L;  // A - W
};

/// k nearest neighbors by Euclidean distance, ties broken by lower index.
inline NeighborSet build_knn(const Matrix& X, int k) {
  const int n = static_cast<int>(X.rows());
  require(k >= 1 && k < n, "build_knn: need 1 <= k < n");
  NeighborSet set;
  set.k = k;
  set.neighbors.resize(n);
  std::vector<std::pair<double, int>> dist(n - 1);
  for (int j = 0; j < n; ++j) {
    int m = 0;
    for (int i = 0; i < n; ++i) {
      if (i == j) continue;
      dist[m++] = {(X.row(i) - X.row(j)).squaredNorm(), i};
    }
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
    set.neighbors[j].resize(k);
    for (int i = 0; i < k; ++i) set.neighbors[j][i] = dist[i].second;
  }
  return set;
}

namespace detail {

/// Per-column QP of the weight subproblem. The gram matrix couples feature
/// (and optionally confidence) reconstruction; the linear term carries the
/// constraint-coding differences. A tiny ridge guards duplicate neighbors.
inline SimplexBoxQP weight_column_qp(const Matrix& X, const Matrix* F, const Matrix* S,
                                     const Matrix* D, const NeighborSet& nbrs, int j,
                                     double alpha, double beta) {
  const int k = nbrs.k;
  const auto& nb = nbrs.neighbors[j];
  Matrix Ox(k, X.cols());
  for (int i = 0; i < k; ++i) Ox.row(i) = X.row(j) - X.row(nb[i]);
  SimplexBoxQP qp;
  qp.gram = Ox * Ox.transpose();
  if (F != nullptr) {
    Matrix Of(k, F->cols());
    for (int i = 0; i < k; ++i) Of.row(i) = F->row(j) - F->row(nb[i]);
    qp.gram += Of * Of.transpose();
  }
  qp.gram.diagonal().array() += 1e-10;
  qp.linear = Vector::Zero(k);
  // The dissimilarity/similarity couplings compare full n-entry columns, so
  // their raw squared norms grow linearly with the number of examples while
  // the feature gram stays O(1). Averaging over the column length keeps the
  // two parts on comparable scales regardless of problem size; otherwise the
  // linear terms dominate, every column collapses onto a single neighbor, and
  // the learned graph shatters into far more components than classes.
  if (D != nullptr && alpha != 0.0) {
    const double inv_n = 1.0 / static_cast<double>(D->rows());
    for (int i = 0; i < k; ++i) {
      qp.linear[i] += alpha * inv_n * (D->col(nb[i]) - D->col(j)).squaredNorm();
    }
  }
  if (S != nullptr && beta != 0.0) {
    const double inv_n = 1.0 / static_cast<double>(S->rows());
    for (int i = 0; i < k; ++i) {
      qp.linear[i] += beta * inv_n * (S->col(nb[i]) - S->col(j)).squaredNorm();
    }
  }
  qp.upper = Vector::Ones(k);
  return qp;
}

inline WeightGraph solve_weight_columns(const Matrix& X, const Matrix* F, const Matrix* S,
                                        const Matrix* D, const NeighborSet& nbrs, double alpha,
                                        double beta) {
  const int n = static_cast<int>(X.rows());
  WeightGraph graph;
  graph.neighbor_set = nbrs;
  graph.W = Matrix::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    const SimplexBoxQP qp = weight_column_qp(X, F, S, D, nbrs, j, alpha, beta);
    const Vector w = solve_simplex_box_qp(qp);
    for (int i = 0; i < nbrs.k; ++i) graph.W(nbrs.neighbors[j][i], j) = w[i];
  }
  return graph;
}

}  // namespace detail

/// Feature-only reconstruction weights (initialization).
inline WeightGraph init_weights(const Matrix& X, const NeighborSet& nbrs) {
  return detail::solve_weight_columns(X, nullptr, nullptr, nullptr, nbrs, 0.0, 0.0);
}

/// Joint weight update coupling features, label confidence, and the
/// similarity/dissimilarity codings. Columns are independent (Jacobi sweep).
inline WeightGraph update_weights(const Matrix& X, const Matrix& F, const Matrix& S,
                                  const Matrix& D, const NeighborSet& nbrs, double alpha,
                                  double beta) {
  return detail::solve_weight_columns(X, &F, &S, &D, nbrs, alpha, beta);
}

/// W-subproblem objective (sum of per-column QP objectives), the quantity
/// the weight sweep minimizes with F, S, D fixed.
inline double weight_subobjective(const Matrix& X, const Matrix* F, const Matrix* S,
                                  const Matrix* D, const WeightGraph& graph, double alpha,
                                  double beta) {
  double total = 0.0;
  const auto& nbrs = graph.neighbor_set;
  for (int j = 0; j < X.rows(); ++j) {
    const SimplexBoxQP qp =
        detail::weight_column_qp(X, F, S, D, nbrs, j, alpha, beta);
    Vector w(nbrs.k);
    for (int i = 0; i < nbrs.k; ++i) w[i] = graph.W(nbrs.neighbors[j][i], j);
    total += qp_objective(qp, w);
  }
  return total;
}

inline LaplacianPair laplacian(const Matrix& W) {
  check_finite(W, "laplacian");
  LaplacianPair lp;
  lp.A = Matrix::Zero(W.rows(), W.cols());
  lp.A.diagonal() = W.rowwise().sum();
  lp.L = lp.A - W;
  return lp;
}

}  // namespace plc
