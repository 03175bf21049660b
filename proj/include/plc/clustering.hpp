#pragma once

#include <vector>

#include "plc/common.hpp"
#include "plc/eig.hpp"
#include "plc/graph.hpp"
#include "plc/kmeans.hpp"
#include "plc/solver.hpp"

namespace plc {

/// Normalized spectral clustering: symmetric Laplacian, smallest-l
/// eigenvectors, row-normalized embedding, then k-means.
inline std::vector<int> spectral_cluster(const Matrix& Wsym, int l, std::uint64_t seed) {
  const int n = static_cast<int>(Wsym.rows());
  require(l >= 1 && l <= n, "spectral_cluster: cluster count out of range");
  if (!is_symmetric(Wsym, 1e-8)) {
    throw std::invalid_argument("spectral_cluster: affinity matrix not symmetric");
  }
  require(Wsym.minCoeff() >= -1e-12, "spectral_cluster: affinity matrix must be nonnegative");

  Vector deg = Wsym.rowwise().sum();
  for (int i = 0; i < n; ++i) deg[i] = std::max(deg[i], 1e-12);  // isolated vertex guard
  const Vector dinv = deg.array().rsqrt();
  Matrix lap = Matrix::Identity(n, n) -
               dinv.asDiagonal() * Wsym * dinv.asDiagonal();
  lap = 0.5 * (lap + lap.transpose());
  const auto [evals, evecs] = eig_sym_smallest(lap, l);
  (void)evals;
  Matrix emb = evecs;
  for (int i = 0; i < n; ++i) {
    const double norm = emb.row(i).norm();
    if (norm > 0.0) emb.row(i) /= norm;
  }
  return kmeans(emb, l, seed).labels;
}

/// K-means on (standardized) raw features.
inline std::vector<int> kmeans_baseline(const Matrix& X, int l, std::uint64_t seed) {
  return kmeans(X, l, seed).labels;
}

/// Plain spectral clustering on the feature-only reconstruction graph; this
/// is exactly the CW ablation path.
inline std::vector<int> sc_baseline(const Matrix& X, int k, int l, std::uint64_t seed) {
  const WeightGraph graph = init_weights(X, build_knn(X, k));
  const Matrix Wsym = 0.5 * (graph.W + graph.W.transpose());
  return spectral_cluster(Wsym, l, seed);
}

/// Symmetrize the learned weight matrix and cluster it.
inline std::vector<int> finalize(const PLCState& state, const PLCConfig& config) {
  const Matrix Wsym = 0.5 * (state.graph.W + state.graph.W.transpose());
  return spectral_cluster(Wsym, config.clusters, config.seed);
}

}  // namespace plc
