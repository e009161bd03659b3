// Shared construction shorthands for the test suites.
#pragma once

#include <random>

#include "sgraph/graph.hpp"

namespace helpers {

using namespace sgraph;

inline Node keyframe(const geom::Pose& p, bool fixed = false) {
  Node n;
  n.value = KeyframeNode{p};
  n.fixed = fixed;
  return n;
}

inline Node marker(const geom::Pose& p, int id, double size = 0.08) {
  Node n;
  n.value = MarkerNode{p, id, size};
  return n;
}

inline Node wall(const geom::SphericalPlane& s) {
  Node n;
  n.value = WallNode{s};
  return n;
}

inline Node doorway(const geom::Pose& p) {
  Node n;
  n.value = DoorwayNode{p};
  return n;
}

inline Node room(const Eigen::Vector3d& c) {
  Node n;
  n.value = RoomNode{c};
  return n;
}

inline Node corridor(const Eigen::Vector3d& c, Axis axis = Axis::kX) {
  Node n;
  n.value = CorridorNode{c, axis};
  return n;
}

inline Eigen::MatrixXd identity_info(int dim) { return Eigen::MatrixXd::Identity(dim, dim); }

inline Factor make_factor(FactorKind kind, std::vector<NodeId> nodes,
                          std::variant<std::monostate, geom::Pose, Eigen::Vector3d> meas,
                          const Eigen::MatrixXd& info) {
  Factor f;
  f.kind = kind;
  f.nodes = std::move(nodes);
  f.measurement = std::move(meas);
  f.information = info;
  return f;
}

inline geom::Pose random_pose(std::mt19937_64& rng, double rot_scale = 0.8,
                              double trans_scale = 2.0) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Vector3d axis(n(rng), n(rng), n(rng));
  axis.normalize();
  std::uniform_real_distribution<double> angle(-rot_scale, rot_scale);
  return {Eigen::Quaterniond(Eigen::AngleAxisd(angle(rng), axis)),
          trans_scale * Eigen::Vector3d(n(rng), n(rng), n(rng))};
}

}  // namespace helpers
