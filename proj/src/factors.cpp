#include "sgraph/factors.hpp"

#include <cmath>

#include "sgraph/lie.hpp"

namespace sgraph {

using geom::Plane;
using geom::Pose;
using geom::SphericalPlane;
using geom::Tangent6;

geom::Tangent6 residual_odometry(const Pose& k_i, const Pose& k_j, const Pose& meas) {
  return geom::boxminus(geom::compose(geom::inverse(k_i), k_j), meas);
}

geom::Tangent6 residual_marker(const Pose& k, const Pose& m_global, const Pose& meas_local) {
  return geom::boxminus(geom::compose(k, meas_local), m_global);
}

Eigen::Vector3d residual_wall_marker(const SphericalPlane& w, const Pose& m) {
  const SphericalPlane marker_plane = geom::plane_to_spherical(geom::plane_from_marker(m));
  const Plane wall = geom::spherical_to_plane(w);
  return {geom::wrap_angle(w.azimuth - marker_plane.azimuth),
          geom::wrap_angle(w.elevation - marker_plane.elevation),
          wall.signed_distance(m.translation)};
}

namespace {

// Signed coordinate of the plane along direction u (u is wall_a's normal;
// sigma aligns wall_b's representation with it).
struct PairGeometry {
  Eigen::Vector3d u;  // shared normal direction, from wall_a
  double sigma;       // sign(n_a . n_b)
  double mid;         // coordinate of the mid-plane along u
};

PairGeometry pair_geometry(const Plane& wall_a, const Plane& wall_b, double parallel_tol,
                           double min_gap) {
  const double align = wall_a.normal.dot(wall_b.normal);
  if (std::abs(align) < std::cos(parallel_tol))
    throw NotParallel("wall planes are not parallel within tolerance");
  const double sigma = align >= 0 ? 1.0 : -1.0;
  const double coord_a = -wall_a.offset;
  const double coord_b = -sigma * wall_b.offset;
  if (std::abs(coord_a - coord_b) <= min_gap)
    throw DegenerateGap("wall planes are closer than the minimum gap");
  return {wall_a.normal, sigma, 0.5 * (coord_a + coord_b)};
}

}  // namespace

Eigen::Vector3d corridor_center(const Plane& wall_a, const Plane& wall_b,
                                const Eigen::Vector3d& marker_center, double parallel_tol,
                                double min_gap) {
  const PairGeometry pg = pair_geometry(wall_a, wall_b, parallel_tol, min_gap);
  return marker_center + (pg.mid - pg.u.dot(marker_center)) * pg.u;
}

Eigen::Vector3d residual_corridor(const Eigen::Vector3d& r, const Plane& wall_a,
                                  const Plane& wall_b, const Eigen::Vector3d& marker_center,
                                  double parallel_tol, double min_gap) {
  return r - corridor_center(wall_a, wall_b, marker_center, parallel_tol, min_gap);
}

Eigen::Vector3d room_center(const Plane& wx_a, const Plane& wx_b, const Plane& wy_a,
                            const Plane& wy_b, double parallel_tol, double min_gap) {
  const PairGeometry px = pair_geometry(wx_a, wx_b, parallel_tol, min_gap);
  const PairGeometry py = pair_geometry(wy_a, wy_b, parallel_tol, min_gap);
  if (std::abs(px.u.dot(py.u)) > std::sin(parallel_tol))
    throw NotPerpendicular("wall pairs are not perpendicular within tolerance");
  return px.mid * px.u + py.mid * py.u;
}

Eigen::Vector3d residual_room(const Eigen::Vector3d& r, const Plane& wx_a, const Plane& wx_b,
                              const Plane& wy_a, const Plane& wy_b, double parallel_tol,
                              double min_gap) {
  return r - room_center(wx_a, wx_b, wy_a, wy_b, parallel_tol, min_gap);
}

Eigen::Vector3d residual_doorway(const Pose& d, const Eigen::Vector3d& r_center,
                                 const Eigen::Vector3d& meas_delta) {
  return meas_delta - (d.translation - r_center);
}

// ---------------------------------------------------------------------------
// Graph-level evaluation
// ---------------------------------------------------------------------------

namespace {

const Node& lookup(const NodeState& state, NodeId id) {
  auto it = state.find(id);
  if (it == state.end()) throw UnknownNode("unknown node id " + std::to_string(id.value));
  return it->second;
}

const Pose& pose_of(const Node& n) {
  switch (n.kind()) {
    case NodeKind::kKeyframe:
      return std::get<KeyframeNode>(n.value).pose;
    case NodeKind::kMarker:
      return std::get<MarkerNode>(n.value).pose;
    case NodeKind::kDoorway:
      return std::get<DoorwayNode>(n.value).pose;
    default:
      throw KindMismatch("node has no pose");
  }
}

const SphericalPlane& wall_of(const Node& n) { return std::get<WallNode>(n.value).plane; }

const Eigen::Vector3d& center_of(const Node& n) {
  if (n.kind() == NodeKind::kRoom) return std::get<RoomNode>(n.value).center;
  if (n.kind() == NodeKind::kCorridor) return std::get<CorridorNode>(n.value).center;
  throw KindMismatch("node has no center");
}

Plane wall_plane(const Node& n) { return geom::spherical_to_plane(wall_of(n)); }

}  // namespace

Eigen::VectorXd factor_residual(const NodeState& state, const Factor& f) {
  switch (f.kind) {
    case FactorKind::kOdometry: {
      const auto& meas = std::get<Pose>(f.measurement);
      return residual_odometry(pose_of(lookup(state, f.nodes[0])),
                               pose_of(lookup(state, f.nodes[1])), meas)
          .vector();
    }
    case FactorKind::kMarkerObs: {
      const auto& meas = std::get<Pose>(f.measurement);
      return residual_marker(pose_of(lookup(state, f.nodes[0])),
                             pose_of(lookup(state, f.nodes[1])), meas)
          .vector();
    }
    case FactorKind::kWallMarker:
      return residual_wall_marker(wall_of(lookup(state, f.nodes[1])),
                                  pose_of(lookup(state, f.nodes[0])));
    case FactorKind::kCorridor: {
      const auto& c = std::get<Eigen::Vector3d>(f.measurement);
      return residual_corridor(center_of(lookup(state, f.nodes[0])),
                               wall_plane(lookup(state, f.nodes[1])),
                               wall_plane(lookup(state, f.nodes[2])), c);
    }
    case FactorKind::kRoom:
      return residual_room(center_of(lookup(state, f.nodes[0])),
                           wall_plane(lookup(state, f.nodes[1])),
                           wall_plane(lookup(state, f.nodes[2])),
                           wall_plane(lookup(state, f.nodes[3])),
                           wall_plane(lookup(state, f.nodes[4])));
    case FactorKind::kDoorwayRoom: {
      const auto& delta = std::get<Eigen::Vector3d>(f.measurement);
      return residual_doorway(pose_of(lookup(state, f.nodes[0])),
                              center_of(lookup(state, f.nodes[1])), delta);
    }
  }
  throw Error("unreachable factor kind");
}

Eigen::VectorXd factor_residual(const SituationalGraph& g, const Factor& f) {
  return factor_residual(g.nodes(), f);
}

Node perturbed(const Node& n, const Eigen::VectorXd& delta) {
  Node out = n;
  switch (n.kind()) {
    case NodeKind::kKeyframe: {
      auto& kf = std::get<KeyframeNode>(out.value);
      kf.pose = geom::boxplus(kf.pose, Tangent6(delta.head<3>(), delta.tail<3>()));
      break;
    }
    case NodeKind::kMarker: {
      auto& m = std::get<MarkerNode>(out.value);
      m.pose = geom::boxplus(m.pose, Tangent6(delta.head<3>(), delta.tail<3>()));
      break;
    }
    case NodeKind::kWall: {
      auto& w = std::get<WallNode>(out.value);
      w.plane.azimuth += delta(0);
      w.plane.elevation += delta(1);
      w.plane.distance += delta(2);
      w.plane = w.plane.normalized();
      break;
    }
    case NodeKind::kDoorway: {
      // world-frame translation update, rotation untouched
      std::get<DoorwayNode>(out.value).pose.translation += delta.head<3>();
      break;
    }
    case NodeKind::kRoom:
      std::get<RoomNode>(out.value).center += delta.head<3>();
      break;
    case NodeKind::kCorridor:
      std::get<CorridorNode>(out.value).center += delta.head<3>();
      break;
  }
  return out;
}

namespace {

// d normal / d (azimuth, elevation) for n = [ce*ca, ce*sa, se].
Eigen::Matrix<double, 3, 2> normal_angle_jacobian(double azimuth, double elevation) {
  const double ca = std::cos(azimuth), sa = std::sin(azimuth);
  const double ce = std::cos(elevation), se = std::sin(elevation);
  Eigen::Matrix<double, 3, 2> j;
  j.col(0) = Eigen::Vector3d(-ce * sa, ce * ca, 0.0);
  j.col(1) = Eigen::Vector3d(-se * ca, -se * sa, ce);
  return j;
}

// Jacobian blocks of -pair_midpoint_vector (q = mid * u) w.r.t. the two wall
// charts [azimuth, elevation, distance]; shared by corridor and room factors.
// qa/qb are d q / d wall; the caller negates for the residual.
void pair_center_jacobians(const SphericalPlane& wa, const PairGeometry& pg,
                           const Eigen::Matrix3d& du_scale, Eigen::Matrix3d& ja,
                           Eigen::Matrix3d& jb) {
  const Eigen::Matrix<double, 3, 2> dn = normal_angle_jacobian(wa.azimuth, wa.elevation);
  ja.col(0) = du_scale * dn.col(0);
  ja.col(1) = du_scale * dn.col(1);
  ja.col(2) = -0.5 * pg.u;
  jb.setZero();
  jb.col(2) = -0.5 * pg.sigma * pg.u;
}

std::vector<Eigen::MatrixXd> jacobian_odometry(const NodeState& state, const Factor& f) {
  const Pose& ki = pose_of(lookup(state, f.nodes[0]));
  const Pose& kj = pose_of(lookup(state, f.nodes[1]));
  const auto& meas = std::get<Pose>(f.measurement);
  const Pose c = geom::compose(geom::inverse(ki), kj);
  const Tangent6 r = geom::boxminus(c, meas);
  const geom::Matrix6d jr_inv = geom::se3_right_jacobian_inv(r);
  std::vector<Eigen::MatrixXd> blocks(2);
  blocks[0] = -jr_inv * geom::se3_adjoint(geom::inverse(c));
  blocks[1] = jr_inv;
  return blocks;
}

std::vector<Eigen::MatrixXd> jacobian_marker_obs(const NodeState& state, const Factor& f) {
  const Pose& k = pose_of(lookup(state, f.nodes[0]));
  const Pose& m = pose_of(lookup(state, f.nodes[1]));
  const auto& meas = std::get<Pose>(f.measurement);
  const Pose b = geom::compose(geom::inverse(m), geom::compose(k, meas));
  const Tangent6 r = geom::log(b);
  const geom::Matrix6d jr_inv = geom::se3_right_jacobian_inv(r);
  std::vector<Eigen::MatrixXd> blocks(2);
  blocks[0] = jr_inv * geom::se3_adjoint(geom::inverse(meas));
  blocks[1] = -jr_inv * geom::se3_adjoint(geom::inverse(b));
  return blocks;
}

std::vector<Eigen::MatrixXd> jacobian_wall_marker(const NodeState& state, const Factor& f) {
  const Pose& m = pose_of(lookup(state, f.nodes[0]));
  const SphericalPlane& w = wall_of(lookup(state, f.nodes[1]));

  const Eigen::Matrix3d rm = m.rotation_matrix();
  const Eigen::Vector3d z = rm.col(2);
  const double xy2 = z.x() * z.x() + z.y() * z.y();
  const Eigen::Vector3d grad_az(-z.y() / xy2, z.x() / xy2, 0.0);
  const Eigen::Vector3d grad_el(0.0, 0.0, 1.0 / std::sqrt(std::max(1.0 - z.z() * z.z(), 1e-24)));
  // right perturbation: d z / d omega = -R * skew(e_z)
  const Eigen::Matrix3d dz_domega = -rm * geom::skew(Eigen::Vector3d::UnitZ());
  const Eigen::Vector3d n_wall = geom::spherical_to_plane(w).normal;

  Eigen::MatrixXd jm = Eigen::MatrixXd::Zero(3, 6);
  jm.block<1, 3>(0, 0) = -grad_az.transpose() * dz_domega;
  jm.block<1, 3>(1, 0) = -grad_el.transpose() * dz_domega;
  jm.block<1, 3>(2, 3) = n_wall.transpose() * rm;

  const Eigen::Matrix<double, 3, 2> dn = normal_angle_jacobian(w.azimuth, w.elevation);
  Eigen::MatrixXd jw = Eigen::MatrixXd::Zero(3, 3);
  jw(0, 0) = 1.0;
  jw(1, 1) = 1.0;
  jw(2, 0) = dn.col(0).dot(m.translation);
  jw(2, 1) = dn.col(1).dot(m.translation);
  jw(2, 2) = 1.0;
  return {jm, jw};
}

std::vector<Eigen::MatrixXd> jacobian_corridor(const NodeState& state, const Factor& f) {
  const SphericalPlane& wa = wall_of(lookup(state, f.nodes[1]));
  const Plane pa = geom::spherical_to_plane(wa);
  const Plane pb = wall_plane(lookup(state, f.nodes[2]));
  const auto& c = std::get<Eigen::Vector3d>(f.measurement);
  const PairGeometry pg = pair_geometry(pa, pb, kParallelTol, kMinWallGap);

  // center = c + (mid - u.c) u; d center / d u = (mid - u.c) I - u c^T
  const Eigen::Matrix3d dcenter_du =
      (pg.mid - pg.u.dot(c)) * Eigen::Matrix3d::Identity() - pg.u * c.transpose();
  Eigen::Matrix3d qa, qb;
  pair_center_jacobians(wa, pg, dcenter_du, qa, qb);

  std::vector<Eigen::MatrixXd> blocks(3);
  blocks[0] = Eigen::Matrix3d::Identity();
  blocks[1] = -qa;
  blocks[2] = -qb;
  return blocks;
}

std::vector<Eigen::MatrixXd> jacobian_room(const NodeState& state, const Factor& f) {
  const SphericalPlane& wxa = wall_of(lookup(state, f.nodes[1]));
  const SphericalPlane& wya = wall_of(lookup(state, f.nodes[3]));
  const Plane pxa = geom::spherical_to_plane(wxa);
  const Plane pxb = wall_plane(lookup(state, f.nodes[2]));
  const Plane pya = geom::spherical_to_plane(wya);
  const Plane pyb = wall_plane(lookup(state, f.nodes[4]));
  const PairGeometry px = pair_geometry(pxa, pxb, kParallelTol, kMinWallGap);
  const PairGeometry py = pair_geometry(pya, pyb, kParallelTol, kMinWallGap);

  // q = mid * u per pair; d q / d u = mid * I
  Eigen::Matrix3d qxa, qxb, qya, qyb;
  pair_center_jacobians(wxa, px, px.mid * Eigen::Matrix3d::Identity(), qxa, qxb);
  pair_center_jacobians(wya, py, py.mid * Eigen::Matrix3d::Identity(), qya, qyb);

  std::vector<Eigen::MatrixXd> blocks(5);
  blocks[0] = Eigen::Matrix3d::Identity();
  blocks[1] = -qxa;
  blocks[2] = -qxb;
  blocks[3] = -qya;
  blocks[4] = -qyb;
  return blocks;
}

std::vector<Eigen::MatrixXd> jacobian_doorway(const NodeState&, const Factor&) {
  std::vector<Eigen::MatrixXd> blocks(2);
  blocks[0] = -Eigen::Matrix3d::Identity();
  blocks[1] = Eigen::Matrix3d::Identity();
  return blocks;
}

}  // namespace

std::vector<Eigen::MatrixXd> factor_jacobian(const NodeState& state, const Factor& f) {
  switch (f.kind) {
    case FactorKind::kOdometry:
      return jacobian_odometry(state, f);
    case FactorKind::kMarkerObs:
      return jacobian_marker_obs(state, f);
    case FactorKind::kWallMarker:
      return jacobian_wall_marker(state, f);
    case FactorKind::kCorridor:
      return jacobian_corridor(state, f);
    case FactorKind::kRoom:
      return jacobian_room(state, f);
    case FactorKind::kDoorwayRoom:
      return jacobian_doorway(state, f);
  }
  throw Error("unreachable factor kind");
}

std::vector<Eigen::MatrixXd> factor_jacobian(const SituationalGraph& g, const Factor& f) {
  return factor_jacobian(g.nodes(), f);
}

std::vector<Eigen::MatrixXd> factor_jacobian_numeric(const NodeState& state, const Factor& f,
                                                     double step) {
  std::vector<Eigen::MatrixXd> blocks;
  blocks.reserve(f.nodes.size());
  const int rdim = residual_dim(f.kind);
  for (std::size_t slot = 0; slot < f.nodes.size(); ++slot) {
    const Node& n = lookup(state, f.nodes[slot]);
    const int tdim = tangent_dim(n.kind());
    Eigen::MatrixXd j(rdim, tdim);
    for (int col = 0; col < tdim; ++col) {
      Eigen::VectorXd delta = Eigen::VectorXd::Zero(tdim);
      NodeState s_plus = state;
      NodeState s_minus = state;
      delta(col) = step;
      s_plus.at(f.nodes[slot]) = perturbed(n, delta);
      delta(col) = -step;
      s_minus.at(f.nodes[slot]) = perturbed(n, delta);
      j.col(col) = (factor_residual(s_plus, f) - factor_residual(s_minus, f)) / (2.0 * step);
    }
    blocks.push_back(std::move(j));
  }
  return blocks;
}

std::vector<Eigen::MatrixXd> factor_jacobian_numeric(const SituationalGraph& g, const Factor& f,
                                                     double step) {
  return factor_jacobian_numeric(g.nodes(), f, step);
}

}  // namespace sgraph
