#pragma once

#include <limits>
#include <vector>

#include "plc/common.hpp"

namespace plc {

struct KMeansResult {
  std::vector<int> labels;  // 0-based cluster ids
  Matrix centroids;
  double cost = 0.0;
  std::vector<double> cost_trace;  // per Lloyd iteration of the best restart
};

namespace detail {

inline double sq_dist(const Matrix& pts, int row, const Matrix& centroids, int c) {
  return (pts.row(row) - centroids.row(c)).squaredNorm();
}

inline Matrix kmeanspp_seed(const Matrix& pts, int k, Rng& rng) {
  const int n = static_cast<int>(pts.rows());
  Matrix centroids(k, pts.cols());
  centroids.row(0) = pts.row(rng.index(n));
  Vector d2 = Vector::Constant(n, std::numeric_limits<double>::infinity());
  for (int c = 1; c < k; ++c) {
    for (int i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], sq_dist(pts, i, centroids, c - 1));
    }
    const double total = d2.sum();
    int pick = 0;
    if (total > 0.0) {
      double target = rng.uniform() * total;
      for (; pick < n - 1; ++pick) {
        target -= d2[pick];
        if (target <= 0.0) break;
      }
    } else {
      pick = static_cast<int>(rng.index(n));
    }
    centroids.row(c) = pts.row(pick);
  }
  return centroids;
}

}  // namespace detail

/// Lloyd's algorithm with k-means++ seeding and multiple restarts; fully
/// deterministic for a fixed seed. Empty clusters are re-seeded from the
/// point farthest from its assigned centroid.
inline KMeansResult kmeans(const Matrix& pts, int k, std::uint64_t seed, int restarts = 10,
                           int max_iter = 300) {
  const int n = static_cast<int>(pts.rows());
  require(k >= 1 && k <= n, "kmeans: cluster count out of range");
  require(restarts >= 1, "kmeans: restarts must be >= 1");
  check_finite(pts, "kmeans input");

  Rng rng(seed);
  KMeansResult best;
  best.cost = std::numeric_limits<double>::infinity();

  for (int run = 0; run < restarts; ++run) {
    Matrix centroids = detail::kmeanspp_seed(pts, k, rng);
    std::vector<int> labels(n, 0);
    std::vector<double> trace;
    double cost = std::numeric_limits<double>::infinity();

    for (int it = 0; it < max_iter; ++it) {
      // Assignment step.
      double new_cost = 0.0;
      for (int i = 0; i < n; ++i) {
        int arg = 0;
        double bd = detail::sq_dist(pts, i, centroids, 0);
        for (int c = 1; c < k; ++c) {
          const double d = detail::sq_dist(pts, i, centroids, c);
          if (d < bd) {
            bd = d;
            arg = c;
          }
        }
        labels[i] = arg;
        new_cost += bd;
      }
      trace.push_back(new_cost);
      if (new_cost >= cost - 1e-12) {
        cost = std::min(cost, new_cost);
        break;
      }
      cost = new_cost;

      // Update step.
      Matrix sums = Matrix::Zero(k, pts.cols());
      std::vector<int> counts(k, 0);
      for (int i = 0; i < n; ++i) {
        sums.row(labels[i]) += pts.row(i);
        ++counts[labels[i]];
      }
      for (int c = 0; c < k; ++c) {
        if (counts[c] > 0) {
          centroids.row(c) = sums.row(c) / counts[c];
        } else {
          // Re-seed from the farthest point.
          int far = 0;
          double fd = -1.0;
          for (int i = 0; i < n; ++i) {
            const double d = detail::sq_dist(pts, i, centroids, labels[i]);
            if (d > fd) {
              fd = d;
              far = i;
            }
          }
          centroids.row(c) = pts.row(far);
        }
      }
    }

    if (cost < best.cost) {
      best.labels = labels;
      best.centroids = centroids;
      best.cost = cost;
      best.cost_trace = trace;
    }
  }
  return best;
}

}  // namespace plc
