#include "sgraph/graph.hpp"

#include <Eigen/Cholesky>
#include <array>
#include <cmath>

namespace sgraph {

Layer layer_of(NodeKind kind) {
  switch (kind) {
    case NodeKind::kKeyframe:
      return Layer::kKeyframe;
    case NodeKind::kMarker:
      return Layer::kMarker;
    case NodeKind::kWall:
    case NodeKind::kDoorway:
      return Layer::kStructural;
    case NodeKind::kRoom:
    case NodeKind::kCorridor:
      return Layer::kHighLevel;
  }
  return Layer::kKeyframe;
}

int residual_dim(FactorKind kind) {
  switch (kind) {
    case FactorKind::kOdometry:
    case FactorKind::kMarkerObs:
      return 6;
    default:
      return 3;
  }
}

std::size_t factor_arity(FactorKind kind) {
  switch (kind) {
    case FactorKind::kCorridor:
      return 3;
    case FactorKind::kRoom:
      return 5;
    default:
      return 2;
  }
}

int tangent_dim(NodeKind kind) {
  switch (kind) {
    case NodeKind::kKeyframe:
    case NodeKind::kMarker:
      return 6;
    default:
      return 3;
  }
}

const char* to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::kKeyframe:
      return "keyframe";
    case NodeKind::kMarker:
      return "marker";
    case NodeKind::kWall:
      return "wall";
    case NodeKind::kDoorway:
      return "doorway";
    case NodeKind::kRoom:
      return "room";
    case NodeKind::kCorridor:
      return "corridor";
  }
  return "?";
}

const char* to_string(FactorKind kind) {
  switch (kind) {
    case FactorKind::kOdometry:
      return "odometry";
    case FactorKind::kMarkerObs:
      return "marker_obs";
    case FactorKind::kWallMarker:
      return "wall_marker";
    case FactorKind::kCorridor:
      return "corridor";
    case FactorKind::kRoom:
      return "room";
    case FactorKind::kDoorwayRoom:
      return "doorway_room";
  }
  return "?";
}

namespace {

void validate_node(const Node& n, const std::set<int>& marker_ids) {
  if (n.kind() == NodeKind::kMarker) {
    const auto& m = std::get<MarkerNode>(n.value);
    if (!(m.size > 0)) throw Error("marker size must be positive");
    if (marker_ids.count(m.marker_id)) throw Error("duplicate marker id in graph");
  }
  if (n.kind() == NodeKind::kWall) {
    const auto& w = std::get<WallNode>(n.value);
    if (!(std::abs(w.plane.elevation) < M_PI / 2))
      throw Error("wall elevation outside (-pi/2, pi/2)");
  }
}

// Required endpoint kinds per factor kind; DoorwayRoom's second slot accepts
// Room or Corridor.
bool endpoint_kind_ok(FactorKind fk, std::size_t slot, NodeKind nk) {
  switch (fk) {
    case FactorKind::kOdometry:
      return nk == NodeKind::kKeyframe;
    case FactorKind::kMarkerObs:
      return slot == 0 ? nk == NodeKind::kKeyframe : nk == NodeKind::kMarker;
    case FactorKind::kWallMarker:
      return slot == 0 ? nk == NodeKind::kMarker : nk == NodeKind::kWall;
    case FactorKind::kCorridor:
      return slot == 0 ? nk == NodeKind::kCorridor : nk == NodeKind::kWall;
    case FactorKind::kRoom:
      return slot == 0 ? nk == NodeKind::kRoom : nk == NodeKind::kWall;
    case FactorKind::kDoorwayRoom:
      return slot == 0 ? nk == NodeKind::kDoorway
                       : (nk == NodeKind::kRoom || nk == NodeKind::kCorridor);
  }
  return false;
}

bool measurement_ok(const Factor& f) {
  switch (f.kind) {
    case FactorKind::kOdometry:
    case FactorKind::kMarkerObs:
      return std::holds_alternative<geom::Pose>(f.measurement);
    case FactorKind::kCorridor:
    case FactorKind::kDoorwayRoom:
      return std::holds_alternative<Eigen::Vector3d>(f.measurement);
    case FactorKind::kWallMarker:
    case FactorKind::kRoom:
      return std::holds_alternative<std::monostate>(f.measurement);
  }
  return false;
}

}  // namespace

void SituationalGraph::validate_factor(const Factor& f) const {
  if (f.nodes.size() != factor_arity(f.kind))
    throw KindMismatch(std::string("factor ") + to_string(f.kind) + " expects " +
                       std::to_string(factor_arity(f.kind)) + " endpoints");
  for (std::size_t i = 0; i < f.nodes.size(); ++i) {
    auto it = nodes_.find(f.nodes[i]);
    if (it == nodes_.end())
      throw UnknownNode("factor endpoint " + std::to_string(f.nodes[i].value) + " does not exist");
    if (!endpoint_kind_ok(f.kind, i, it->second.kind()))
      throw KindMismatch(std::string("factor ") + to_string(f.kind) + " endpoint " +
                         std::to_string(i) + " has kind " + to_string(it->second.kind()));
  }
  if (!measurement_ok(f))
    throw KindMismatch(std::string("factor ") + to_string(f.kind) + " has wrong measurement type");

  const int dim = residual_dim(f.kind);
  if (f.information.rows() != dim || f.information.cols() != dim)
    throw BadInformationMatrix("information matrix must be " + std::to_string(dim) + "x" +
                               std::to_string(dim));
  const double scale = f.information.cwiseAbs().maxCoeff();
  if (!(scale > 0) || !f.information.allFinite())
    throw BadInformationMatrix("information matrix must be finite and nonzero");
  if ((f.information - f.information.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw BadInformationMatrix("information matrix must be symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(f.information);
  if (llt.info() != Eigen::Success)
    throw BadInformationMatrix("information matrix must be positive-definite");
}

NodeId SituationalGraph::add_node(Node n) {
  validate_node(n, marker_ids_);
  if (n.kind() == NodeKind::kMarker) marker_ids_.insert(std::get<MarkerNode>(n.value).marker_id);
  const NodeId id{next_node_++};
  nodes_.emplace(id, std::move(n));
  return id;
}

FactorId SituationalGraph::add_factor(Factor f) {
  validate_factor(f);
  const FactorId id{next_factor_++};
  factors_.emplace(id, std::move(f));
  return id;
}

void SituationalGraph::remove_factor(FactorId id) {
  if (factors_.erase(id) == 0) throw UnknownNode("unknown factor id");
}

void SituationalGraph::remove_node(NodeId id) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw UnknownNode("unknown node id");
  if (it->second.kind() == NodeKind::kMarker)
    marker_ids_.erase(std::get<MarkerNode>(it->second.value).marker_id);
  for (auto fit = factors_.begin(); fit != factors_.end();) {
    const auto& ends = fit->second.nodes;
    if (std::find(ends.begin(), ends.end(), id) != ends.end())
      fit = factors_.erase(fit);
    else
      ++fit;
  }
  nodes_.erase(it);
}

const Node& SituationalGraph::node(NodeId id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw UnknownNode("unknown node id " + std::to_string(id.value));
  return it->second;
}

Node& SituationalGraph::node(NodeId id) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw UnknownNode("unknown node id " + std::to_string(id.value));
  return it->second;
}

const Factor& SituationalGraph::factor(FactorId id) const {
  auto it = factors_.find(id);
  if (it == factors_.end()) throw UnknownNode("unknown factor id " + std::to_string(id.value));
  return it->second;
}

std::size_t SituationalGraph::count_nodes(NodeKind kind) const {
  std::size_t n = 0;
  for (const auto& [id, node] : nodes_)
    if (node.kind() == kind) ++n;
  return n;
}

std::size_t SituationalGraph::count_factors(FactorKind kind) const {
  std::size_t n = 0;
  for (const auto& [id, f] : factors_)
    if (f.kind == kind) ++n;
  return n;
}

void SituationalGraph::set_fixed(NodeId id, bool fixed) { node(id).fixed = fixed; }

void SituationalGraph::insert_with_ids(NodeId id, Node n, std::uint64_t next_node,
                                       std::uint64_t next_factor) {
  validate_node(n, marker_ids_);
  if (nodes_.count(id)) throw Error("duplicate node id on import");
  if (n.kind() == NodeKind::kMarker) marker_ids_.insert(std::get<MarkerNode>(n.value).marker_id);
  nodes_.emplace(id, std::move(n));
  next_node_ = std::max(next_node_, next_node);
  next_factor_ = std::max(next_factor_, next_factor);
}

void SituationalGraph::insert_with_ids(FactorId id, Factor f) {
  validate_factor(f);
  if (factors_.count(id)) throw Error("duplicate factor id on import");
  factors_.emplace(id, std::move(f));
}

}  // namespace sgraph
