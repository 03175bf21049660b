#pragma once

#include <vector>

#include "plc/common.hpp"
#include "plc/qp.hpp"

namespace plc {

/// Uniform confidence over each candidate set.
inline Matrix init_confidence(const Matrix& Y) {
  const int n = static_cast<int>(Y.rows());
  Matrix F = Matrix::Zero(n, Y.cols());
  for (int i = 0; i < n; ++i) {
    const double count = Y.row(i).sum();
    if (count < 0.5) {
      throw std::invalid_argument("init_confidence: empty candidate set at row " +
                                  std::to_string(i + 1));
    }
    F.row(i) = Y.row(i) / count;
  }
  return F;
}

/// Residual of the disambiguation objective: sum_j ||f_j - sum_i w_ij f_i||^2.
inline double disambiguation_objective(const Matrix& W, const Matrix& F) {
  return (F - W.transpose() * F).squaredNorm();
}

/// Quadratic-form matrix of the disambiguation objective. Note this is the
/// exact expansion of the residual, not the (inconsistent) closed form of
/// the source derivation; the identity is covered by tests.
inline Matrix confidence_quadratic(const Matrix& W) {
  const Matrix B = Matrix::Identity(W.rows(), W.rows()) - W;
  return B * B.transpose();
}

/// One Gauss-Seidel sweep over the per-row confidence subproblems, each a
/// capped-simplex QP with gram t_jj I and the candidate row as upper bound.
/// The objective is non-increasing across the sweep.
namespace detail {

/// One sweep with a precomputed quadratic-form matrix T.
inline Matrix confidence_sweep(const Matrix& T, const Matrix& Y, const Matrix& F0) {
  const int n = static_cast<int>(T.rows());
  const int q = static_cast<int>(Y.cols());
  Matrix F = F0;
  SimplexBoxQP qp;
  qp.gram = Matrix::Zero(q, q);
  for (int j = 0; j < n; ++j) {
    const double tjj = std::max(T(j, j), 0.0);  // PSD up to roundoff
    qp.gram.diagonal().setConstant(tjj);
    // T is symmetric, so sum_{i!=j} (t_ij + t_ji) f_i = 2 (T_j. F - t_jj f_j).
    qp.linear = 2.0 * (F.transpose() * T.col(j) - tjj * F.row(j).transpose());
    qp.upper = Y.row(j).transpose();
    F.row(j) = solve_simplex_box_qp(qp).transpose();
  }
  check_finite(F, "update_confidence");
  return F;
}

}  // namespace detail

inline Matrix update_confidence(const Matrix& W, const Matrix& Y, const Matrix& F0) {
  require(F0.rows() == W.rows() && F0.cols() == Y.cols(),
          "update_confidence: shape mismatch");
  return detail::confidence_sweep(confidence_quadratic(W), Y, F0);
}

/// Repeats confidence sweeps until the subproblem reaches its fixed point
/// (entrywise change below tol) or the sweep cap is hit. A single sweep is a
/// Gauss-Seidel pass and can leave F far from the block optimum, which feeds
/// noisy pseudo-labels into the constraint stage.
inline Matrix converge_confidence(const Matrix& W, const Matrix& Y, const Matrix& F0,
                                  int max_sweeps = 100, double tol = 1e-10) {
  require(F0.rows() == W.rows() && F0.cols() == Y.cols(),
          "converge_confidence: shape mismatch");
  const Matrix T = confidence_quadratic(W);
  Matrix F = F0;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    Matrix next = detail::confidence_sweep(T, Y, F);
    const double delta = (next - F).cwiseAbs().maxCoeff();
    F = std::move(next);
    if (delta < tol) break;
  }
  return F;
}

/// Per-row argmax margin: best minus second-best confidence. Rows at or near
/// zero margin are coin-flip pseudo-labels.
inline Vector confidence_margins(const Matrix& F) {
  const int n = static_cast<int>(F.rows());
  Vector margins(n);
  for (int i = 0; i < n; ++i) {
    double best = -1.0, second = -1.0;
    for (int j = 0; j < F.cols(); ++j) {
      const double v = F(i, j);
      if (v > best) { second = best; best = v; }
      else if (v > second) { second = v; }
    }
    margins[i] = F.cols() > 1 ? best - second : best;
  }
  return margins;
}

/// Per-row argmax of the confidence matrix, ties to the lowest label index.
inline std::vector<int> pseudo_labels(const Matrix& F) {
  std::vector<int> labels(F.rows());
  for (int i = 0; i < F.rows(); ++i) {
    int arg = 0;
    for (int j = 1; j < F.cols(); ++j) {
      if (F(i, j) > F(i, arg)) arg = j;
    }
    labels[i] = arg;
  }
  return labels;
}

}  // namespace plc
