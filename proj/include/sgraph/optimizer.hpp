#pragma once

#include <vector>

#include "sgraph/graph.hpp"

namespace sgraph {

struct OptimizeConfig {
  int max_iters = 100;
  double g_tol = 1e-8;        // inf-norm of the half-cost gradient
  double f_tol = 1e-10;       // relative cost decrease per accepted step
  double lambda_init = 1e-4;  // LM damping, x10 on reject, x0.5 on accept
  double lambda_max = 1e10;
  double lambda_min = 1e-15;
  double huber_delta = 0.0;  // Huber threshold on the whitened norm; 0 = off
};

struct OptimizeReport {
  int iterations = 0;  // accepted steps
  double initial_cost = 0.0;
  double final_cost = 0.0;
  double final_gradient_norm = 0.0;
  bool converged = false;
  std::vector<double> cost_trace;  // initial cost, then cost after each accepted step
};

/// Total cost sum_f r^T Lambda r (Huber-reweighted when enabled).
double total_cost(const SituationalGraph& g, double huber_delta = 0.0);

/// Damped Gauss-Newton over all non-fixed node tangents. Requires exactly one
/// fixed keyframe (gauge); throws NoGaugeFixed otherwise, LinearSolveFailed
/// when the damped normal equations stay rank-deficient.
OptimizeReport optimize(SituationalGraph& g, const OptimizeConfig& cfg = {});

}  // namespace sgraph
