#pragma once

#include <Eigen/Core>
#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <variant>
#include <vector>

#include "sgraph/errors.hpp"
#include "sgraph/geometry.hpp"

namespace sgraph {

struct NodeId {
  std::uint64_t value = 0;
  auto operator<=>(const NodeId&) const = default;
  bool valid() const { return value != 0; }
};

struct FactorId {
  std::uint64_t value = 0;
  auto operator<=>(const FactorId&) const = default;
  bool valid() const { return value != 0; }
};

enum class NodeKind { kKeyframe, kMarker, kWall, kDoorway, kRoom, kCorridor };
enum class FactorKind { kOdometry, kMarkerObs, kWallMarker, kCorridor, kRoom, kDoorwayRoom };

/// Graph layers, bottom to top.
enum class Layer { kKeyframe, kMarker, kStructural, kHighLevel };

enum class Axis { kX, kY };

struct KeyframeNode {
  geom::Pose pose;
};
struct MarkerNode {
  geom::Pose pose;
  int marker_id = 0;
  double size = 0.0;  // edge length, meters
};
struct WallNode {
  geom::SphericalPlane plane;
};
struct DoorwayNode {
  geom::Pose pose;  // rotation held constant during optimization
};
struct RoomNode {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
};
struct CorridorNode {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Axis axis = Axis::kX;  // axis of the wall-pair normals
};

struct Node {
  // variant order matches NodeKind
  std::variant<KeyframeNode, MarkerNode, WallNode, DoorwayNode, RoomNode, CorridorNode> value;
  bool fixed = false;

  NodeKind kind() const { return static_cast<NodeKind>(value.index()); }
};

Layer layer_of(NodeKind kind);
int residual_dim(FactorKind kind);
std::size_t factor_arity(FactorKind kind);
/// Local parametrization size: 6 for poses, 3 for walls, centers, and
/// doorways (doorway rotation is not optimized).
int tangent_dim(NodeKind kind);

const char* to_string(NodeKind kind);
const char* to_string(FactorKind kind);

struct Factor {
  FactorKind kind = FactorKind::kOdometry;
  std::vector<NodeId> nodes;
  // Odometry/MarkerObs carry a relative pose; Corridor carries the attached
  // marker center; DoorwayRoom carries the frozen door-to-space delta.
  std::variant<std::monostate, geom::Pose, Eigen::Vector3d> measurement;
  Eigen::MatrixXd information;  // SPD, residual_dim x residual_dim
};

/// The jointly optimizable multi-layer graph. Node and factor ids are
/// assigned sequentially and never reused.
class SituationalGraph {
 public:
  NodeId add_node(Node n);
  FactorId add_factor(Factor f);

  /// Removes a node together with every factor attached to it.
  void remove_node(NodeId id);
  void remove_factor(FactorId id);

  bool has_node(NodeId id) const { return nodes_.count(id) != 0; }
  bool has_factor(FactorId id) const { return factors_.count(id) != 0; }

  const Node& node(NodeId id) const;
  Node& node(NodeId id);
  const Factor& factor(FactorId id) const;

  const std::map<NodeId, Node>& nodes() const { return nodes_; }
  const std::map<FactorId, Factor>& factors() const { return factors_; }

  std::size_t count_nodes(NodeKind kind) const;
  std::size_t count_factors(FactorKind kind) const;

  void set_fixed(NodeId id, bool fixed);

  /// Used by the importer to reproduce an exported graph verbatim.
  void insert_with_ids(NodeId id, Node n, std::uint64_t next_node, std::uint64_t next_factor);
  void insert_with_ids(FactorId id, Factor f);
  std::uint64_t next_node_id() const { return next_node_; }
  std::uint64_t next_factor_id() const { return next_factor_; }

 private:
  void validate_factor(const Factor& f) const;

  std::map<NodeId, Node> nodes_;
  std::map<FactorId, Factor> factors_;
  std::set<int> marker_ids_;
  std::uint64_t next_node_ = 1;
  std::uint64_t next_factor_ = 1;
};

}  // namespace sgraph
