#include "sgraph/optimizer.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <cmath>
#include <optional>
#include <set>

#include "sgraph/factors.hpp"

namespace sgraph {

namespace {

double huber_cost(double squared_norm, double delta) {
  if (delta <= 0.0) return squared_norm;
  const double e = std::sqrt(squared_norm);
  return e <= delta ? squared_norm : 2.0 * delta * e - delta * delta;
}

double huber_weight(double squared_norm, double delta) {
  if (delta <= 0.0) return 1.0;
  const double e = std::sqrt(squared_norm);
  return e <= delta ? 1.0 : delta / e;
}

double state_cost(const NodeState& state, const SituationalGraph& g, double huber_delta) {
  double cost = 0.0;
  for (const auto& [id, f] : g.factors()) {
    const Eigen::VectorXd r = factor_residual(state, f);
    cost += huber_cost(r.dot(f.information * r), huber_delta);
  }
  return cost;
}

// Cost of a candidate state; residual preconditions violated by a trial step
// (non-parallel walls, pole) make the step unacceptable rather than fatal.
std::optional<double> try_state_cost(const NodeState& state, const SituationalGraph& g,
                                     double huber_delta) {
  try {
    return state_cost(state, g, huber_delta);
  } catch (const NotParallel&) {
  } catch (const NotPerpendicular&) {
  } catch (const DegenerateGap&) {
  } catch (const PoleSingularity&) {
  }
  return std::nullopt;
}

struct StateIndex {
  std::map<NodeId, int> offset;  // non-fixed nodes only
  int dim = 0;
};

StateIndex build_index(const SituationalGraph& g) {
  // Nodes with no incident factor contribute nothing to the objective (e.g.
  // a doorway whose space factor is still deferred); leave them out.
  std::set<NodeId> constrained;
  for (const auto& [fid, f] : g.factors())
    for (const NodeId& id : f.nodes) constrained.insert(id);

  StateIndex idx;
  for (const auto& [id, n] : g.nodes()) {
    if (n.fixed || !constrained.count(id)) continue;
    idx.offset[id] = idx.dim;
    idx.dim += tangent_dim(n.kind());
  }
  return idx;
}

NodeState apply_step(const NodeState& state, const StateIndex& idx, const Eigen::VectorXd& delta) {
  NodeState out = state;
  for (const auto& [id, off] : idx.offset) {
    const Node& n = state.at(id);
    out.at(id) = perturbed(n, delta.segment(off, tangent_dim(n.kind())));
  }
  return out;
}

// Gradient of the half cost, b = sum J^T Lambda r.
Eigen::VectorXd gradient(const NodeState& state, const SituationalGraph& g, const StateIndex& idx,
                         double huber_delta) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(idx.dim);
  for (const auto& [fid, f] : g.factors()) {
    const Eigen::VectorXd r = factor_residual(state, f);
    const std::vector<Eigen::MatrixXd> jacs = factor_jacobian(state, f);
    const double w = huber_weight(r.dot(f.information * r), huber_delta);
    for (std::size_t a = 0; a < f.nodes.size(); ++a) {
      auto it = idx.offset.find(f.nodes[a]);
      if (it == idx.offset.end()) continue;
      b.segment(it->second, jacs[a].cols()) += jacs[a].transpose() * (w * f.information) * r;
    }
  }
  return b;
}

}  // namespace

double total_cost(const SituationalGraph& g, double huber_delta) {
  return state_cost(g.nodes(), g, huber_delta);
}

OptimizeReport optimize(SituationalGraph& g, const OptimizeConfig& cfg) {
  std::size_t fixed_keyframes = 0;
  for (const auto& [id, n] : g.nodes())
    if (n.kind() == NodeKind::kKeyframe && n.fixed) ++fixed_keyframes;
  if (fixed_keyframes != 1)
    throw NoGaugeFixed("expected exactly one fixed keyframe, found " +
                       std::to_string(fixed_keyframes));

  const StateIndex idx = build_index(g);
  NodeState state = g.nodes();

  OptimizeReport report;
  report.initial_cost = state_cost(state, g, cfg.huber_delta);
  report.cost_trace.push_back(report.initial_cost);
  double cost = report.initial_cost;
  double lambda = cfg.lambda_init;

  for (int iter = 0; iter < cfg.max_iters && !report.converged; ++iter) {
    // Assemble normal equations H delta = -b at the current state.
    Eigen::VectorXd b = Eigen::VectorXd::Zero(idx.dim);
    std::vector<Eigen::Triplet<double>> triplets;
    for (const auto& [fid, f] : g.factors()) {
      const Eigen::VectorXd r = factor_residual(state, f);
      const std::vector<Eigen::MatrixXd> jacs = factor_jacobian(state, f);
      const double w = huber_weight(r.dot(f.information * r), cfg.huber_delta);
      const Eigen::MatrixXd info = w * f.information;

      for (std::size_t a = 0; a < f.nodes.size(); ++a) {
        auto ita = idx.offset.find(f.nodes[a]);
        if (ita == idx.offset.end()) continue;
        const Eigen::MatrixXd jta_info = jacs[a].transpose() * info;
        b.segment(ita->second, jacs[a].cols()) += jta_info * r;
        for (std::size_t c = 0; c < f.nodes.size(); ++c) {
          auto itc = idx.offset.find(f.nodes[c]);
          if (itc == idx.offset.end()) continue;
          const Eigen::MatrixXd h_block = jta_info * jacs[c];
          for (int i = 0; i < h_block.rows(); ++i)
            for (int j = 0; j < h_block.cols(); ++j)
              triplets.emplace_back(ita->second + i, itc->second + j, h_block(i, j));
        }
      }
    }

    report.final_gradient_norm = idx.dim == 0 ? 0.0 : b.lpNorm<Eigen::Infinity>();
    if (report.final_gradient_norm < cfg.g_tol) {
      report.converged = true;
      break;
    }

    Eigen::SparseMatrix<double> h(idx.dim, idx.dim);
    h.setFromTriplets(triplets.begin(), triplets.end());
    const Eigen::VectorXd h_diag = h.diagonal();

    // Inner damping loop: retry with larger lambda until a step reduces the
    // cost or the damping range is exhausted.
    bool accepted = false;
    bool solver_succeeded = false;
    while (lambda <= cfg.lambda_max) {
      Eigen::SparseMatrix<double> damped = h;
      for (int i = 0; i < idx.dim; ++i) damped.coeffRef(i, i) = (1.0 + lambda) * h_diag(i);

      Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> solver(damped);
      Eigen::VectorXd delta;
      if (solver.info() == Eigen::Success) delta = solver.solve(-b);
      if (solver.info() != Eigen::Success || !delta.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      solver_succeeded = true;

      const NodeState candidate = apply_step(state, idx, delta);
      const std::optional<double> new_cost = try_state_cost(candidate, g, cfg.huber_delta);
      if (new_cost && *new_cost <= cost) {
        state = candidate;
        const double decrease = cost - *new_cost;
        cost = *new_cost;
        report.cost_trace.push_back(cost);
        ++report.iterations;
        lambda = std::max(lambda * 0.5, cfg.lambda_min);
        accepted = true;
        if (decrease < cfg.f_tol * std::max(cost, 1e-300)) report.converged = true;
        break;
      }
      lambda *= 10.0;
    }

    if (!accepted) {
      if (!solver_succeeded)
        throw LinearSolveFailed("normal equations rank-deficient after damping");
      break;  // no improving step in the damping range; keep the current state
    }
  }

  report.final_gradient_norm =
      idx.dim == 0 ? 0.0 : gradient(state, g, idx, cfg.huber_delta).lpNorm<Eigen::Infinity>();
  if (report.final_gradient_norm < cfg.g_tol) report.converged = true;
  report.final_cost = cost;
  for (const auto& [id, n] : state) g.node(id) = n;
  return report;
}

}  // namespace sgraph
