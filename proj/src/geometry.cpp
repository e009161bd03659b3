#include "sgraph/geometry.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "sgraph/lie.hpp"

namespace sgraph::geom {

double wrap_angle(double a) {
  double w = std::remainder(a, 2.0 * M_PI);
  if (w <= -M_PI) w += 2.0 * M_PI;
  return w;
}

Pose compose(const Pose& a, const Pose& b) {
  return {(a.rotation * b.rotation).normalized(), a.rotation * b.translation + a.translation};
}

Pose inverse(const Pose& p) {
  const Eigen::Quaterniond qi = p.rotation.conjugate();
  return {qi, -(qi * p.translation)};
}

namespace {

Eigen::Quaterniond quat_exp(const Eigen::Vector3d& omega) {
  const double theta = omega.norm();
  double scale;  // sin(theta/2) / theta
  if (theta < 1e-8) {
    scale = 0.5 - theta * theta / 48.0;
  } else {
    scale = std::sin(0.5 * theta) / theta;
  }
  Eigen::Quaterniond q(std::cos(0.5 * theta), scale * omega.x(), scale * omega.y(),
                       scale * omega.z());
  return q.normalized();
}

Eigen::Vector3d quat_log(const Eigen::Quaterniond& q_in) {
  Eigen::Quaterniond q = q_in;
  if (q.w() < 0) q.coeffs() = -q.coeffs();  // same rotation, shortest arc
  const Eigen::Vector3d v = q.vec();
  const double s = v.norm();
  if (s < 1e-12) return 2.0 / q.w() * v;
  const double theta = 2.0 * std::atan2(s, q.w());
  return (theta / s) * v;
}

}  // namespace

Pose exp(const Tangent6& xi) {
  return {quat_exp(xi.rot), so3_left_jacobian(xi.rot) * xi.trans};
}

Tangent6 log(const Pose& p) {
  const Eigen::Vector3d omega = quat_log(p.rotation);
  return {omega, so3_left_jacobian_inv(omega) * p.translation};
}

Pose boxplus(const Pose& p, const Tangent6& xi) { return compose(p, exp(xi)); }

Tangent6 boxminus(const Pose& a, const Pose& b) { return log(compose(inverse(b), a)); }

Plane::Plane(const Eigen::Vector3d& n, double d) {
  const double s = n.norm();
  if (s < 1e-300) throw DegenerateFit("plane normal has zero length");
  normal = n / s;
  offset = d / s;
}

SphericalPlane SphericalPlane::normalized() const {
  SphericalPlane s = *this;
  s.elevation = wrap_angle(s.elevation);
  if (s.elevation > M_PI / 2) {
    s.elevation = M_PI - s.elevation;
    s.azimuth += M_PI;
  } else if (s.elevation < -M_PI / 2) {
    s.elevation = -M_PI - s.elevation;
    s.azimuth += M_PI;
  }
  s.azimuth = wrap_angle(s.azimuth);
  return s;
}

Plane plane_from_marker(const Pose& marker_pose) {
  const Eigen::Vector3d n = marker_pose.rotation * Eigen::Vector3d::UnitZ();
  return {n, -n.dot(marker_pose.translation)};
}

Plane canonicalize(const Plane& p, const Eigen::Vector3d& observer) {
  return p.signed_distance(observer) < 0 ? p.flipped() : p;
}

Plane plane_refine(std::span<const Eigen::Vector3d> points, const Plane& init) {
  if (points.size() < 3) throw DegenerateFit("plane fit needs at least 3 points");

  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const auto& p : points) centroid += p;
  centroid /= static_cast<double>(points.size());

  Eigen::MatrixXd centered(points.size(), 3);
  for (size_t i = 0; i < points.size(); ++i) centered.row(i) = (points[i] - centroid).transpose();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  const auto& sigma = svd.singularValues();
  if (sigma(1) <= 1e-10 * std::max(sigma(0), 1e-30) || sigma(0) == 0.0)
    throw DegenerateFit("points are collinear or coincident");

  Eigen::Vector3d normal = svd.matrixV().col(2);
  if (normal.dot(init.normal) < 0) normal = -normal;
  return {normal, -normal.dot(centroid)};
}

SphericalPlane plane_to_spherical(const Plane& p) {
  const Eigen::Vector3d& n = p.normal;
  if (std::abs(n.z()) >= std::cos(kPoleGuard))
    throw PoleSingularity("plane normal within pole guard of +-z");
  SphericalPlane s;
  s.azimuth = std::atan2(n.y(), n.x());
  s.elevation = std::asin(std::clamp(n.z(), -1.0, 1.0));
  s.distance = p.offset;
  return s;
}

Plane spherical_to_plane(const SphericalPlane& s) {
  const double ce = std::cos(s.elevation);
  Plane p;  // n is unit by construction; skip renormalization to keep d exact
  p.normal = Eigen::Vector3d(ce * std::cos(s.azimuth), ce * std::sin(s.azimuth),
                             std::sin(s.elevation));
  p.offset = s.distance;
  return p;
}

Plane plane_in_frame(const Pose& T, const Plane& p) {
  const Eigen::Vector3d n_local = T.rotation.conjugate() * p.normal;
  return {n_local, p.normal.dot(T.translation) + p.offset};
}

}  // namespace sgraph::geom
