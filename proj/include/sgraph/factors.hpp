#pragma once

#include <Eigen/Core>
#include <vector>

#include "sgraph/geometry.hpp"
#include "sgraph/graph.hpp"

namespace sgraph {

/// Wall-pair geometry tolerances. Generous enough for marker-derived planes,
/// tight enough to reject perpendicular walls.
inline constexpr double kParallelTol = 10.0 * M_PI / 180.0;  // rad
inline constexpr double kMinWallGap = 0.01;                  // meters

// ---------------------------------------------------------------------------
// Residuals. Each is exactly zero at a consistent noiseless configuration.
// ---------------------------------------------------------------------------

/// Relative-pose error between two keyframes: boxminus(k_i^-1 * k_j, meas).
geom::Tangent6 residual_odometry(const geom::Pose& k_i, const geom::Pose& k_j,
                                 const geom::Pose& meas);

/// Marker observation error: boxminus(k * meas_local, m_global), i.e. the
/// globally predicted marker pose against the marker node.
geom::Tangent6 residual_marker(const geom::Pose& k, const geom::Pose& m_global,
                               const geom::Pose& meas_local);

/// [azimuth difference, elevation difference, point-plane distance] between a
/// wall and a marker attached to it (marker plane normal = marker +z). Angle
/// components wrapped to (-pi, pi]. Throws PoleSingularity when the marker's
/// normal is too close to +-z.
Eigen::Vector3d residual_wall_marker(const geom::SphericalPlane& w, const geom::Pose& m);

/// Center of a two-wall space: midway between the planes along the shared
/// normal, off-normal components taken from marker_center.
/// Throws NotParallel / DegenerateGap.
Eigen::Vector3d corridor_center(const geom::Plane& wall_a, const geom::Plane& wall_b,
                                const Eigen::Vector3d& marker_center,
                                double parallel_tol = kParallelTol,
                                double min_gap = kMinWallGap);

Eigen::Vector3d residual_corridor(const Eigen::Vector3d& r, const geom::Plane& wall_a,
                                  const geom::Plane& wall_b, const Eigen::Vector3d& marker_center,
                                  double parallel_tol = kParallelTol,
                                  double min_gap = kMinWallGap);

/// Center of a four-wall rectangular room: sum of the two per-axis
/// between-planes midpoint vectors. Throws NotParallel / NotPerpendicular /
/// DegenerateGap.
Eigen::Vector3d room_center(const geom::Plane& wx_a, const geom::Plane& wx_b,
                            const geom::Plane& wy_a, const geom::Plane& wy_b,
                            double parallel_tol = kParallelTol, double min_gap = kMinWallGap);

Eigen::Vector3d residual_room(const Eigen::Vector3d& r, const geom::Plane& wx_a,
                              const geom::Plane& wx_b, const geom::Plane& wy_a,
                              const geom::Plane& wy_b, double parallel_tol = kParallelTol,
                              double min_gap = kMinWallGap);

/// meas_delta - (translation(d) - r_center).
Eigen::Vector3d residual_doorway(const geom::Pose& d, const Eigen::Vector3d& r_center,
                                 const Eigen::Vector3d& meas_delta);

// ---------------------------------------------------------------------------
// Graph-level evaluation over a node-state snapshot.
// ---------------------------------------------------------------------------

using NodeState = std::map<NodeId, Node>;

Eigen::VectorXd factor_residual(const NodeState& state, const Factor& f);
Eigen::VectorXd factor_residual(const SituationalGraph& g, const Factor& f);

/// Applies a tangent increment to one node: right-multiplicative pose
/// retraction for keyframes/markers, additive chart with angle wrapping for
/// walls, additive translation for doorways and centers.
Node perturbed(const Node& n, const Eigen::VectorXd& delta);

/// d residual / d node-tangent, one block per connected node, analytic.
std::vector<Eigen::MatrixXd> factor_jacobian(const NodeState& state, const Factor& f);
std::vector<Eigen::MatrixXd> factor_jacobian(const SituationalGraph& g, const Factor& f);

/// Central-difference reference Jacobian.
std::vector<Eigen::MatrixXd> factor_jacobian_numeric(const NodeState& state, const Factor& f,
                                                     double step = 1e-6);
std::vector<Eigen::MatrixXd> factor_jacobian_numeric(const SituationalGraph& g, const Factor& f,
                                                     double step = 1e-6);

}  // namespace sgraph
