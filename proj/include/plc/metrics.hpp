#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "plc/common.hpp"
#include "plc/eig.hpp"

namespace plc {

namespace detail {

/// Minimum-cost assignment on a square cost matrix (Hungarian algorithm with
/// potentials, O(n^3)). Returns the column matched to each row.
inline std::vector<int> hungarian(const Matrix& cost) {
  const int n = static_cast<int>(cost.rows());
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0);  // match[col] = row (1-based)
  for (int row = 1; row <= n; ++row) {
    match[0] = row;
    int j0 = 0;
    std::vector<double> minv(n + 1, std::numeric_limits<double>::infinity());
    std::vector<int> way(n + 1, 0);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      double delta = std::numeric_limits<double>::infinity();
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(n);
  for (int j = 1; j <= n; ++j) {
    if (match[j] > 0) row_to_col[match[j] - 1] = j - 1;
  }
  return row_to_col;
}

inline Matrix contingency(const std::vector<int>& a, const std::vector<int>& b, int& ka,
                          int& kb) {
  require(a.size() == b.size() && !a.empty(), "contingency: length mismatch or empty");
  ka = kb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    require(a[i] >= 0 && b[i] >= 0, "contingency: negative label");
    ka = std::max(ka, a[i] + 1);
    kb = std::max(kb, b[i] + 1);
  }
  Matrix m = Matrix::Zero(ka, kb);
  for (std::size_t i = 0; i < a.size(); ++i) m(a[i], b[i]) += 1.0;
  return m;
}

}  // namespace detail

/// Clustering accuracy: agreement fraction under the optimal one-to-one
/// matching of clusters to classes.
inline double clustering_accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
  int kp = 0, kt = 0;
  const Matrix counts = detail::contingency(pred, truth, kp, kt);
  require(kp <= 64 && kt <= 64, "clustering_accuracy: more than 64 labels");
  const int s = std::max(kp, kt);
  const double top = counts.maxCoeff();
  Matrix cost = Matrix::Constant(s, s, top);  // padding: zero agreement
  cost.topLeftCorner(kp, kt) = top - counts.array();
  const auto assign = detail::hungarian(cost);
  double matched = 0.0;
  for (int c = 0; c < kp; ++c) {
    if (assign[c] < kt) matched += counts(c, assign[c]);
  }
  return matched / static_cast<double>(pred.size());
}

/// NMI with geometric-mean normalization; 0 log 0 = 0; returns 0 when either
/// partition has zero entropy, 1 exactly for identical partitions.
inline double normalized_mutual_information(const std::vector<int>& pred,
                                            const std::vector<int>& truth) {
  int kp = 0, kt = 0;
  const Matrix counts = detail::contingency(pred, truth, kp, kt);
  const double n = static_cast<double>(pred.size());

  // One nonzero per row and per column means the partitions coincide.
  bool identical = true;
  for (int i = 0; i < kp && identical; ++i) {
    if ((counts.row(i).array() > 0.0).count() > 1) identical = false;
  }
  for (int j = 0; j < kt && identical; ++j) {
    if ((counts.col(j).array() > 0.0).count() > 1) identical = false;
  }

  const Vector pr = counts.rowwise().sum() / n;
  const Vector pc = counts.colwise().sum().transpose() / n;
  double hp = 0.0, hc = 0.0, mi = 0.0;
  for (int i = 0; i < kp; ++i) {
    if (pr[i] > 0.0) hp -= pr[i] * std::log(pr[i]);
  }
  for (int j = 0; j < kt; ++j) {
    if (pc[j] > 0.0) hc -= pc[j] * std::log(pc[j]);
  }
  if (hp <= 0.0 || hc <= 0.0) return 0.0;
  if (identical) return 1.0;
  for (int i = 0; i < kp; ++i) {
    for (int j = 0; j < kt; ++j) {
      const double pij = counts(i, j) / n;
      if (pij > 0.0) mi += pij * std::log(pij / (pr[i] * pc[j]));
    }
  }
  return mi / std::sqrt(hp * hc);
}

/// Numeric check of the disambiguation-vs-weight-matrix bound:
///   ||W_G - W||_F / n^2 <= (n+2)/(lambda n) ||F'F - F_G'F_G||_F
///                          + (2n+q-1)/(lambda n),
/// with lambda the smallest eigenvalue of F_G'F_G. Premises: F_G one-hot
/// with every class present (lambda > 0) and ||W_G - W||_F >= 1.
struct BoundReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double lambda = 0.0;
  bool assumptions_met = false;
  bool holds = false;
};

inline BoundReport theorem_bound_check(const Matrix& F, const Matrix& Fg, const Matrix& W,
                                       const Matrix& Wg) {
  const int n = static_cast<int>(F.rows());
  const int q = static_cast<int>(F.cols());
  require(Fg.rows() == n && Fg.cols() == q && W.rows() == n && Wg.rows() == n,
          "theorem_bound_check: shape mismatch");
  BoundReport r;
  const auto [evals, evecs] = eig_sym_smallest(Fg.transpose() * Fg, 1);
  (void)evecs;
  r.lambda = evals[0];
  const double delta_w = (Wg - W).norm();
  r.assumptions_met = r.lambda > 1e-12 && delta_w >= 1.0;
  if (r.lambda <= 1e-12) return r;  // no verdict without a full-rank F_G
  r.lhs = delta_w / (static_cast<double>(n) * n);
  r.rhs = (n + 2.0) / (r.lambda * n) * (F.transpose() * F - Fg.transpose() * Fg).norm() +
          (2.0 * n + q - 1.0) / (r.lambda * n);
  r.holds = r.lhs <= r.rhs;
  return r;
}

}  // namespace plc
