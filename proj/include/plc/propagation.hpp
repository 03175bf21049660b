#pragma once

#include <vector>

#include "plc/common.hpp"
#include "plc/graph.hpp"

namespace plc {

/// Must-link / cannot-link indicators plus the propagated similarity and
/// dissimilarity codings. M and C have disjoint supports, P = M | C.
struct ConstraintState {
  Matrix M, C, P;  // n x n binary
  Matrix S, D;     // n x n nonnegative
  double gamma = 10.0;
};

/// Pairwise indicators from pseudo-labels. Off-diagonal pairs only; when
/// scope_mask is non-empty, only pairs with both rows in scope are set.
inline ConstraintState build_constraints(const std::vector<int>& pseudo,
                                         const std::vector<char>& scope_mask,
                                         double gamma = 10.0) {
  const int n = static_cast<int>(pseudo.size());
  require(scope_mask.empty() || static_cast<int>(scope_mask.size()) == n,
          "build_constraints: scope mask size mismatch");
  ConstraintState st;
  st.gamma = gamma;
  st.M = Matrix::Zero(n, n);
  st.C = Matrix::Zero(n, n);
  auto in_scope = [&](int i) { return scope_mask.empty() || scope_mask[i]; };
  for (int i = 0; i < n; ++i) {
    if (!in_scope(i)) continue;
    for (int j = 0; j < n; ++j) {
      if (j == i || !in_scope(j)) continue;
      (pseudo[i] == pseudo[j] ? st.M : st.C)(i, j) = 1.0;
    }
  }
  st.P = st.M + st.C;  // disjoint supports
  return st;
}

/// Laplacian used by constraint propagation. The learned W is column
/// normalized but not symmetric, and pairing its raw row sums with the
/// off-diagonal part gives an indefinite quadratic form (the propagation
/// objective becomes unbounded below and the multiplicative updates
/// overflow whenever a node has near-zero in-degree). Propagation therefore
/// runs on the symmetrized graph, whose Laplacian is PSD.
inline LaplacianPair propagation_laplacian(const Matrix& W) {
  const Matrix Wsym = 0.5 * (W + W.transpose());
  return laplacian(Wsym);
}

/// Penalized propagation objective:
///   ||D (.) S||_1 + alpha Tr(D L D') + beta Tr(S L S')
///   + gamma (||P (.) (S - M)||_F^2 + ||P (.) (D - C)||_F^2).
inline double pcp_objective(const ConstraintState& st, const Matrix& W, double alpha,
                            double beta) {
  const LaplacianPair lp = propagation_laplacian(W);
  const double adversarial = st.D.cwiseProduct(st.S).sum();
  const double prop_d = alpha * (st.D * lp.L * st.D.transpose()).trace();
  const double prop_s = beta * (st.S * lp.L * st.S.transpose()).trace();
  const double clamp = st.gamma * (st.P.cwiseProduct(st.S - st.M).squaredNorm() +
                                   st.P.cwiseProduct(st.D - st.C).squaredNorm());
  return adversarial + prop_d + prop_s + clamp;
}

/// KKT multiplicative updates for S and D, applied alternately (S first,
/// then D against the fresh S). Nonnegativity is preserved by construction;
/// the penalized objective is non-increasing per iteration because the
/// Laplacian of the symmetrized graph is PSD (see propagation_laplacian).
inline void update_sd(ConstraintState& st, const Matrix& W, double alpha, double beta,
                      int iterations) {
  require(alpha >= 0.0 && beta >= 0.0 && st.gamma >= 0.0,
          "update_sd: weights must be nonnegative");
  const double delta = 1e-12;
  const Matrix Wsym = 0.5 * (W + W.transpose());
  const Vector a = Wsym.rowwise().sum();
  const Matrix gm = 2.0 * st.gamma * st.P.cwiseProduct(st.M);
  const Matrix gc = 2.0 * st.gamma * st.P.cwiseProduct(st.C);
  for (int it = 0; it < iterations; ++it) {
    const Matrix s_num = gm + 2.0 * beta * (st.S * Wsym);
    const Matrix s_den = st.D + 2.0 * beta * (st.S * a.asDiagonal()) +
                         2.0 * st.gamma * st.P.cwiseProduct(st.S);
    st.S = st.S.cwiseProduct(s_num.cwiseQuotient(s_den.array().max(delta).matrix()));
    const Matrix d_num = gc + 2.0 * alpha * (st.D * Wsym);
    const Matrix d_den = st.S + 2.0 * alpha * (st.D * a.asDiagonal()) +
                         2.0 * st.gamma * st.P.cwiseProduct(st.D);
    st.D = st.D.cwiseProduct(d_num.cwiseQuotient(d_den.array().max(delta).matrix()));
    if (!st.S.allFinite() || !st.D.allFinite()) {
      throw std::runtime_error("update_sd: non-finite entry at iteration " +
                               std::to_string(it + 1));
    }
  }
}

/// Strictly positive start (frozen zeros cannot move under multiplicative
/// updates) followed by a short warm-up.
inline void init_sd(ConstraintState& st, const Matrix& W, double alpha, double beta,
                    int warmup_iterations = 20) {
  const double eps = 1e-3;
  const Matrix off = Matrix::Ones(st.P.rows(), st.P.cols()) - st.P;
  st.S = st.M + eps * off;
  st.D = st.C + eps * off;
  update_sd(st, W, alpha, beta, warmup_iterations);
}

}  // namespace plc
