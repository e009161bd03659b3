#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <span>

#include "sgraph/errors.hpp"

namespace sgraph::geom {

/// Planes whose normal lies within this angle (rad) of the +-z axis have no
/// usable azimuth; conversions reject them.
inline constexpr double kPoleGuard = 1e-6;

/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

/// Minimal se(3) increment, rotation block first.
struct Tangent6 {
  Eigen::Vector3d rot{Eigen::Vector3d::Zero()};    // axis-angle, radians
  Eigen::Vector3d trans{Eigen::Vector3d::Zero()};  // meters

  Tangent6() = default;
  Tangent6(const Eigen::Vector3d& r, const Eigen::Vector3d& t) : rot(r), trans(t) {}

  static Tangent6 from_vector(const Eigen::Matrix<double, 6, 1>& v) {
    return {v.head<3>(), v.tail<3>()};
  }
  Eigen::Matrix<double, 6, 1> vector() const {
    Eigen::Matrix<double, 6, 1> v;
    v << rot, trans;
    return v;
  }
  double norm() const { return vector().norm(); }
};

/// Rigid-body transform in SE(3). The quaternion is kept unit-norm by every
/// constructor and composition.
struct Pose {
  Eigen::Quaterniond rotation{Eigen::Quaterniond::Identity()};
  Eigen::Vector3d translation{Eigen::Vector3d::Zero()};

  Pose() = default;
  Pose(const Eigen::Quaterniond& q, const Eigen::Vector3d& t)
      : rotation(q.normalized()), translation(t) {}

  static Pose identity() { return {}; }
  static Pose from_translation(const Eigen::Vector3d& t) {
    return {Eigen::Quaterniond::Identity(), t};
  }

  Eigen::Matrix3d rotation_matrix() const { return rotation.toRotationMatrix(); }

  /// Applies the transform to a point.
  Eigen::Vector3d operator*(const Eigen::Vector3d& p) const {
    return rotation * p + translation;
  }
};

Pose compose(const Pose& a, const Pose& b);
Pose inverse(const Pose& p);

/// SE(3) exponential map (rotation via Rodrigues, translation via the SO(3)
/// left Jacobian).
Pose exp(const Tangent6& xi);
/// SE(3) logarithm, inverse of exp for ||rot|| < pi.
Tangent6 log(const Pose& p);

/// Right-multiplicative retraction: P * exp(xi).
Pose boxplus(const Pose& p, const Tangent6& xi);
/// log(inverse(b) * a); zero iff a == b.
Tangent6 boxminus(const Pose& a, const Pose& b);

/// Oriented infinite plane, convention normal . x + offset = 0 for on-plane x.
struct Plane {
  Eigen::Vector3d normal{Eigen::Vector3d::UnitX()};  // unit
  double offset = 0.0;                               // meters

  Plane() = default;
  Plane(const Eigen::Vector3d& n, double d);

  /// Signed distance of a point; positive on the side the normal points into.
  double signed_distance(const Eigen::Vector3d& p) const {
    return normal.dot(p) + offset;
  }
  Plane flipped() const { return {-normal, -offset}; }
};

/// Plane in the (azimuth, elevation, distance) chart.
struct SphericalPlane {
  double azimuth = 0.0;    // rad
  double elevation = 0.0;  // rad, (-pi/2, pi/2) away from poles
  double distance = 0.0;   // meters, equals the Plane offset

  /// Wraps azimuth into (-pi, pi] and reflects elevation back into
  /// [-pi/2, pi/2]; represents the same plane.
  SphericalPlane normalized() const;
};

/// Plane spanned by the marker face: normal = marker +z axis, through the
/// marker origin. No sign canonicalization.
Plane plane_from_marker(const Pose& marker_pose);

/// Flips (normal, offset) so the normal points into the half-space that
/// contains the observer. Leaves on-plane observers untouched.
Plane canonicalize(const Plane& p, const Eigen::Vector3d& observer);

/// Total least-squares plane through the points (centroid + smallest singular
/// direction), sign-canonicalized against init. Throws DegenerateFit for
/// fewer than 3 points or collinear input.
Plane plane_refine(std::span<const Eigen::Vector3d> points, const Plane& init);

/// Throws PoleSingularity when the normal is within kPoleGuard of +-z.
SphericalPlane plane_to_spherical(const Plane& p);
Plane spherical_to_plane(const SphericalPlane& s);

/// Expresses a global plane in the local frame of T: the result is satisfied
/// by x_local iff p is satisfied by T * x_local.
Plane plane_in_frame(const Pose& T, const Plane& p);

}  // namespace sgraph::geom
