#pragma once

#include <functional>
#include <string>
#include <vector>

#include "plc/common.hpp"
#include "plc/dataset.hpp"
#include "plc/disambiguation.hpp"
#include "plc/graph.hpp"
#include "plc/propagation.hpp"

namespace plc {

enum class Variant { Full, CW, LD, SD };

inline std::string variant_name(Variant v) {
  switch (v) {
    case Variant::Full: return "PLC";
    case Variant::CW: return "PLC-CW";
    case Variant::LD: return "PLC-LD";
    case Variant::SD: return "PLC-SD";
  }
  return "?";
}

struct PLCConfig {
  int k = 10;
  double alpha = 0.1;
  double beta = 0.1;
  double gamma = 10.0;
  int clusters = 2;
  int max_outer = 50;
  double rel_tol = 1e-4;
  Variant variant = Variant::Full;
  std::uint64_t seed = 0;
  bool refresh_constraints = true;   // rebuild M/C/P from pseudo-labels each outer iteration
  bool constraints_train_only = true;
  // Examples whose confidence margin (best minus second-best) falls below
  // this are left out of constraint construction: a near-tied row makes the
  // pseudo-label a coin flip, and hard must/cannot-links built from it cut
  // the example off from its own class.
  double constraint_margin = 0.05;
  // Multiplicative update passes per outer iteration. Under-iterating leaves
  // transient differences between same-class S/D columns that act as noise in
  // the weight QP linear terms and can disconnect twin points from the graph.
  int sd_iterations = 30;
  int f_sweeps = 100;                // confidence sweeps cap per outer iteration
  double f_tol = 1e-8;               // fixed-point tolerance for the confidence block
  // Invoked after each outer iteration (diagnostics / invariant checks).
  std::function<void(const struct PLCState&, int)> on_iteration;
};

struct PLCState {
  WeightGraph graph;
  Matrix confidence;           // n x q
  ConstraintState constraints;
  std::vector<double> objective_trace;
  int iterations_run = 0;
};

/// Full penalized model objective: feature and confidence reconstruction
/// residuals plus the propagation terms of the S/D subproblem.
inline double joint_objective(const PLCState& state, const PartialLabelProblem& problem,
                              const PLCConfig& config) {
  const Matrix& W = state.graph.W;
  const Matrix& X = problem.dataset.features;
  double value = (X - W.transpose() * X).squaredNorm();
  value += disambiguation_objective(W, state.confidence);
  if (state.constraints.S.size() > 0) {
    value += pcp_objective(state.constraints, W, config.alpha, config.beta);
  }
  if (!std::isfinite(value)) throw std::runtime_error("joint_objective: non-finite value");
  return value;
}

/// Algorithm: build the k-NN graph, initialize W / F / constraints / S,D,
/// then alternate the three block updates until the relative objective
/// change drops below rel_tol or max_outer is reached.
inline PLCState run_plc(const PartialLabelProblem& problem, const PLCConfig& config) {
  require(config.k >= 1 && config.clusters >= 1 && config.rel_tol > 0.0,
          "run_plc: invalid configuration");
  const Matrix& X = problem.dataset.features;
  const Matrix& Y = problem.candidates;
  const int n = static_cast<int>(X.rows());

  PLCState state;
  const NeighborSet nbrs = build_knn(X, config.k);
  state.graph = init_weights(X, nbrs);
  state.confidence = init_confidence(Y);
  state.constraints.gamma = config.gamma;
  state.constraints.M = state.constraints.C = state.constraints.P = Matrix::Zero(n, n);
  state.constraints.S = state.constraints.D = Matrix::Zero(n, n);

  if (config.variant == Variant::CW) {
    state.objective_trace.push_back(joint_objective(state, problem, config));
    return state;
  }

  // Initialize F by disambiguation on the feature-space graph.
  state.confidence =
      converge_confidence(state.graph.W, Y, state.confidence, config.f_sweeps, config.f_tol);

  // Constraint scope: train examples (unless disabled) whose pseudo-label is
  // decisive per the margin threshold.
  const auto constraint_scope = [&](const Matrix& F) {
    std::vector<char> scope(n, 1);
    const Vector margins = confidence_margins(F);
    for (int i = 0; i < n; ++i) {
      const bool in_train = !config.constraints_train_only || problem.train_mask[i];
      scope[i] = in_train && margins[i] >= config.constraint_margin;
    }
    return scope;
  };
  const bool with_sd = config.variant != Variant::LD;
  if (with_sd) {
    state.constraints = build_constraints(pseudo_labels(state.confidence),
                                          constraint_scope(state.confidence), config.gamma);
    init_sd(state.constraints, state.graph.W, config.alpha, config.beta);
  }

  state.objective_trace.push_back(joint_objective(state, problem, config));

  const Matrix zero = Matrix::Zero(n, n);
  for (int iter = 0; iter < config.max_outer; ++iter) {
    // W block.
    if (config.variant == Variant::SD) {
      // Constraint codings only; the disambiguation coupling is ablated.
      state.graph = detail::solve_weight_columns(X, nullptr, &state.constraints.S,
                                                 &state.constraints.D, nbrs, config.alpha,
                                                 config.beta);
    } else if (with_sd) {
      state.graph = update_weights(X, state.confidence, state.constraints.S,
                                   state.constraints.D, nbrs, config.alpha, config.beta);
    } else {
      state.graph = update_weights(X, state.confidence, zero, zero, nbrs, 0.0, 0.0);
    }

    // F block (skipped by the SD ablation), solved to its own fixed point so
    // the pseudo-labels handed to the constraint stage reflect the current W.
    if (config.variant != Variant::SD) {
      state.confidence =
          converge_confidence(state.graph.W, Y, state.confidence, config.f_sweeps, config.f_tol);
    }

    // S/D block.
    if (with_sd) {
      if (config.refresh_constraints && config.variant != Variant::SD) {
        ConstraintState fresh =
            build_constraints(pseudo_labels(state.confidence),
                              constraint_scope(state.confidence), config.gamma);
        fresh.S = state.constraints.S;
        fresh.D = state.constraints.D;
        state.constraints = std::move(fresh);
      }
      update_sd(state.constraints, state.graph.W, config.alpha, config.beta,
                config.sd_iterations);
    }

    state.iterations_run = iter + 1;
    const double prev = state.objective_trace.back();
    const double obj = joint_objective(state, problem, config);
    state.objective_trace.push_back(obj);
    if (config.on_iteration) config.on_iteration(state, iter + 1);
    if (std::abs(obj - prev) < config.rel_tol * std::max(1.0, std::abs(prev))) break;
  }
  return state;
}

}  // namespace plc
