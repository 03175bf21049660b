#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "plc/common.hpp"

namespace plc {

/// Quadratic program over the capped simplex:
///   min  w' gram w + linear' w
///   s.t. sum(w) = 1,  0 <= w <= upper.
/// gram must be symmetric PSD; sum(upper) >= 1 for feasibility.
struct SimplexBoxQP {
  Matrix gram;
  Vector linear;
  Vector upper;
};

inline double qp_objective(const SimplexBoxQP& p, const Vector& w) {
  return w.dot(p.gram * w) + p.linear.dot(w);
}

/// Euclidean projection onto {w : sum(w) = 1, 0 <= w <= upper} via bisection
/// on the shift multiplier.
inline Vector project_capped_simplex(const Vector& v, const Vector& upper) {
  const int k = static_cast<int>(v.size());
  require(upper.size() == k, "project_capped_simplex: size mismatch");
  if (upper.sum() < 1.0 - 1e-12) {
    throw std::runtime_error("project_capped_simplex: infeasible bounds (sum(upper) < 1)");
  }
  auto mass = [&](double tau) {
    double s = 0.0;
    for (int i = 0; i < k; ++i) {
      s += std::clamp(v[i] - tau, 0.0, upper[i]);
    }
    return s;
  };
  double lo = v.minCoeff() - upper.maxCoeff() - 1.0;  // mass(lo) = sum(upper) >= 1
  double hi = v.maxCoeff();                           // mass(hi) = 0
  for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mass(mid) >= 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double tau = 0.5 * (lo + hi);
  Vector w(k);
  for (int i = 0; i < k; ++i) w[i] = std::clamp(v[i] - tau, 0.0, upper[i]);
  // Distribute the residual over interior coordinates to pin sum(w) = 1.
  double resid = 1.0 - w.sum();
  for (int pass = 0; pass < 4 && std::abs(resid) > 0.0; ++pass) {
    for (int i = 0; i < k && std::abs(resid) > 0.0; ++i) {
      const double room = resid > 0.0 ? upper[i] - w[i] : w[i];
      const double d = std::copysign(std::min(std::abs(resid), room), resid);
      w[i] += d;
      resid -= d;
    }
  }
  return w;
}

namespace detail {

enum class BoundState { Free, Lower, Upper };

/// Max KKT violation at w; mu is searched so that the reported residual is
/// the smallest achievable for any multiplier of the sum constraint.
inline double kkt_residual(const SimplexBoxQP& p, const Vector& w, double bound_eps = 1e-10) {
  const int k = static_cast<int>(w.size());
  const Vector g = 2.0 * (p.gram * w) + p.linear;
  auto violation = [&](double mu) {
    double worst = 0.0;
    for (int i = 0; i < k; ++i) {
      if (w[i] <= bound_eps) {
        worst = std::max(worst, mu - g[i]);  // lower bound active: need g >= mu
      } else if (w[i] >= p.upper[i] - bound_eps) {
        worst = std::max(worst, g[i] - mu);  // upper bound active: need g <= mu
      } else {
        worst = std::max(worst, std::abs(g[i] - mu));
      }
    }
    return worst;
  };
  // violation(mu) is convex piecewise linear; ternary search.
  double lo = g.minCoeff() - 1.0;
  double hi = g.maxCoeff() + 1.0;
  for (int it = 0; it < 200; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (violation(m1) <= violation(m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  return violation(0.5 * (lo + hi));
}

inline Vector projected_gradient_solve(const SimplexBoxQP& p, Vector w, double tol,
                                       long max_iter) {
  const double lip = 2.0 * p.gram.cwiseAbs().rowwise().sum().maxCoeff() + 1e-12;
  const double step = 1.0 / lip;
  for (long it = 0; it < max_iter; ++it) {
    const Vector g = 2.0 * (p.gram * w) + p.linear;
    w = project_capped_simplex(w - step * g, p.upper);
    if ((it & 63) == 0 && kkt_residual(p, w) <= tol) break;
  }
  return w;
}

}  // namespace detail

/// Active-set solver over the capped simplex, with a projected-gradient
/// fallback if the working-set loop fails to settle.
inline Vector solve_simplex_box_qp(const SimplexBoxQP& p, double tol = 1e-8) {
  using detail::BoundState;
  const int k = static_cast<int>(p.gram.rows());
  require(k >= 1 && p.gram.cols() == k && p.linear.size() == k && p.upper.size() == k,
          "solve_simplex_box_qp: inconsistent dimensions");
  if (!is_symmetric(p.gram, 1e-10)) {
    throw std::invalid_argument("solve_simplex_box_qp: gram matrix not symmetric");
  }
  if (p.upper.sum() < 1.0 - 1e-12) {
    throw std::runtime_error("solve_simplex_box_qp: infeasible bounds (sum(upper) < 1)");
  }
  require(tol > 0.0, "solve_simplex_box_qp: tol must be positive");

  // Coordinates with a zero upper bound are pinned at both bounds and only
  // destabilize the working set; eliminate them up front.
  {
    std::vector<int> live;
    for (int i = 0; i < k; ++i) {
      if (p.upper[i] > 1e-15) live.push_back(i);
    }
    if (static_cast<int>(live.size()) < k) {
      const int m = static_cast<int>(live.size());
      SimplexBoxQP sub;
      sub.gram = Matrix(m, m);
      sub.linear = Vector(m);
      sub.upper = Vector(m);
      for (int a = 0; a < m; ++a) {
        sub.linear[a] = p.linear[live[a]];
        sub.upper[a] = p.upper[live[a]];
        for (int b = 0; b < m; ++b) sub.gram(a, b) = p.gram(live[a], live[b]);
      }
      const Vector ws = solve_simplex_box_qp(sub, tol);
      Vector full = Vector::Zero(k);
      for (int a = 0; a < m; ++a) full[live[a]] = ws[a];
      return full;
    }
  }

  const double bound_eps = 1e-12;
  Vector w = project_capped_simplex(Vector::Constant(k, 1.0 / k), p.upper);
  std::vector<BoundState> state(k);
  auto classify = [&]() {
    for (int i = 0; i < k; ++i) {
      if (w[i] <= bound_eps) {
        state[i] = BoundState::Lower;
        w[i] = 0.0;
      } else if (w[i] >= p.upper[i] - bound_eps) {
        state[i] = BoundState::Upper;
        w[i] = p.upper[i];
      } else {
        state[i] = BoundState::Free;
      }
    }
  };
  classify();

  const int max_iter = 40 * k + 100;
  for (int iter = 0; iter < max_iter; ++iter) {
    std::vector<int> free;
    for (int i = 0; i < k; ++i) {
      if (state[i] == BoundState::Free) free.push_back(i);
    }
    const Vector g = 2.0 * (p.gram * w) + p.linear;

    if (free.empty()) {
      // Multiplier interval test: need mu <= g_i on lower, mu >= g_i on upper.
      double mu_lo = -std::numeric_limits<double>::infinity();
      double mu_hi = std::numeric_limits<double>::infinity();
      for (int i = 0; i < k; ++i) {
        if (state[i] == BoundState::Lower) {
          mu_hi = std::min(mu_hi, g[i]);
        } else {
          mu_lo = std::max(mu_lo, g[i]);
        }
      }
      if (mu_lo <= mu_hi + tol) return w;
      const double mu = 0.5 * (mu_lo + mu_hi);
      int worst = -1;
      double worst_v = 0.0;
      for (int i = 0; i < k; ++i) {
        const double v = state[i] == BoundState::Lower ? mu - g[i] : g[i] - mu;
        if (v > worst_v) {
          worst_v = v;
          worst = i;
        }
      }
      state[worst] = BoundState::Free;
      continue;
    }

    // Equality-constrained subproblem on the free set:
    //   2 G_FF wF - mu 1 = -(c_F + 2 G_FB wB),  1' wF = 1 - sum(wB).
    const int m = static_cast<int>(free.size());
    Matrix kkt = Matrix::Zero(m + 1, m + 1);
    Vector rhs(m + 1);
    double bound_mass = 0.0;
    for (int i = 0; i < k; ++i) {
      if (state[i] == BoundState::Upper) bound_mass += w[i];
    }
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) kkt(a, b) = 2.0 * p.gram(free[a], free[b]);
      kkt(a, m) = -1.0;
      kkt(m, a) = 1.0;
      double cross = 0.0;
      for (int i = 0; i < k; ++i) {
        if (state[i] != BoundState::Free) cross += p.gram(free[a], i) * w[i];
      }
      rhs[a] = -(p.linear[free[a]] + 2.0 * cross);
    }
    rhs[m] = 1.0 - bound_mass;
    const Vector sol = kkt.completeOrthogonalDecomposition().solve(rhs);
    const double mu = sol[m];

    bool inside = true;
    for (int a = 0; a < m; ++a) {
      if (sol[a] < -bound_eps || sol[a] > p.upper[free[a]] + bound_eps) {
        inside = false;
        break;
      }
    }
    if (inside) {
      for (int a = 0; a < m; ++a) w[free[a]] = std::clamp(sol[a], 0.0, p.upper[free[a]]);
      // Check multipliers of the bound variables.
      const Vector gn = 2.0 * (p.gram * w) + p.linear;
      int worst = -1;
      double worst_v = tol;
      for (int i = 0; i < k; ++i) {
        if (state[i] == BoundState::Lower && mu - gn[i] > worst_v) {
          worst_v = mu - gn[i];
          worst = i;
        } else if (state[i] == BoundState::Upper && gn[i] - mu > worst_v) {
          worst_v = gn[i] - mu;
          worst = i;
        }
      }
      if (worst < 0) {
        if (detail::kkt_residual(p, w) <= tol) return w;
        break;  // degenerate; fall back
      }
      state[worst] = BoundState::Free;
      continue;
    }

    // Step toward the subproblem solution until a box constraint blocks.
    double t = 1.0;
    int blocking = -1;
    bool to_upper = false;
    for (int a = 0; a < m; ++a) {
      const int i = free[a];
      const double d = sol[a] - w[i];
      if (d < -bound_eps && sol[a] < 0.0) {
        const double ti = (0.0 - w[i]) / d;
        if (ti < t) {
          t = ti;
          blocking = i;
          to_upper = false;
        }
      } else if (d > bound_eps && sol[a] > p.upper[i]) {
        const double ti = (p.upper[i] - w[i]) / d;
        if (ti < t) {
          t = ti;
          blocking = i;
          to_upper = true;
        }
      }
    }
    for (int a = 0; a < m; ++a) {
      const int i = free[a];
      w[i] = std::clamp(w[i] + t * (sol[a] - w[i]), 0.0, p.upper[i]);
    }
    if (blocking >= 0) {
      state[blocking] = to_upper ? BoundState::Upper : BoundState::Lower;
      w[blocking] = to_upper ? p.upper[blocking] : 0.0;
    }
  }

  // Active-set loop cycled or hit a degenerate face; finish with projected
  // gradient from the current iterate.
  w = detail::projected_gradient_solve(p, w, tol, 200000);
  check_finite(w, "solve_simplex_box_qp");
  return w;
}

}  // namespace plc
