#include "sgraph/lie.hpp"

#include <cmath>

namespace sgraph::geom {

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d s;
  // clang-format off
  s <<     0, -v.z(),  v.y(),
       v.z(),      0, -v.x(),
      -v.y(),  v.x(),      0;
  // clang-format on
  return s;
}

Eigen::Matrix3d so3_exp(const Eigen::Vector3d& omega) {
  const double theta2 = omega.squaredNorm();
  const double theta = std::sqrt(theta2);
  const Eigen::Matrix3d W = skew(omega);
  double a, b;  // sin(t)/t, (1-cos(t))/t^2
  if (theta < 1e-6) {
    a = 1.0 - theta2 / 6.0;
    b = 0.5 - theta2 / 24.0;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / theta2;
  }
  return Eigen::Matrix3d::Identity() + a * W + b * W * W;
}

Eigen::Vector3d so3_log(const Eigen::Matrix3d& R) {
  const Eigen::AngleAxisd aa(R);
  return aa.angle() * aa.axis();
}

Eigen::Matrix3d so3_left_jacobian(const Eigen::Vector3d& omega) {
  const double theta2 = omega.squaredNorm();
  const double theta = std::sqrt(theta2);
  const Eigen::Matrix3d W = skew(omega);
  double a, b;  // (1-cos(t))/t^2, (t-sin(t))/t^3
  if (theta < 1e-6) {
    a = 0.5 - theta2 / 24.0;
    b = 1.0 / 6.0 - theta2 / 120.0;
  } else {
    a = (1.0 - std::cos(theta)) / theta2;
    b = (theta - std::sin(theta)) / (theta2 * theta);
  }
  return Eigen::Matrix3d::Identity() + a * W + b * W * W;
}

Eigen::Matrix3d so3_left_jacobian_inv(const Eigen::Vector3d& omega) {
  const double theta2 = omega.squaredNorm();
  const double theta = std::sqrt(theta2);
  const Eigen::Matrix3d W = skew(omega);
  double c;  // 1/t^2 - (1+cos(t)) / (2 t sin(t))
  if (theta < 1e-6) {
    c = 1.0 / 12.0 + theta2 / 720.0;
  } else {
    c = 1.0 / theta2 - (1.0 + std::cos(theta)) / (2.0 * theta * std::sin(theta));
  }
  return Eigen::Matrix3d::Identity() - 0.5 * W + c * W * W;
}

Matrix6d se3_adjoint(const Pose& T) {
  const Eigen::Matrix3d R = T.rotation_matrix();
  Matrix6d adj = Matrix6d::Zero();
  adj.block<3, 3>(0, 0) = R;
  adj.block<3, 3>(3, 3) = R;
  adj.block<3, 3>(3, 0) = skew(T.translation) * R;
  return adj;
}

namespace {

// Rotation-translation coupling block of the SE(3) left Jacobian
// (Barfoot's Q matrix).
Eigen::Matrix3d se3_q_matrix(const Eigen::Vector3d& omega, const Eigen::Vector3d& v) {
  const double theta2 = omega.squaredNorm();
  const double theta = std::sqrt(theta2);
  const Eigen::Matrix3d W = skew(omega);
  const Eigen::Matrix3d V = skew(v);

  double c1, c2, c3;
  if (theta < 1e-4) {
    c1 = 1.0 / 6.0 - theta2 / 120.0;
    c2 = 1.0 / 24.0 - theta2 / 720.0;
    c3 = 1.0 / 120.0 - theta2 / 2520.0;
  } else {
    const double st = std::sin(theta);
    const double ct = std::cos(theta);
    const double t4 = theta2 * theta2;
    c1 = (theta - st) / (theta2 * theta);
    c2 = -(1.0 - 0.5 * theta2 - ct) / t4;
    c3 = 0.5 * c2 + 1.5 * (theta - st - theta2 * theta / 6.0) / (t4 * theta);
  }

  return 0.5 * V + c1 * (W * V + V * W + W * V * W) +
         c2 * (W * W * V + V * W * W - 3.0 * W * V * W) + c3 * (W * V * W * W + W * W * V * W);
}

// SE(3) left Jacobian inverse, [rot; trans] block order.
Matrix6d se3_left_jacobian_inv(const Tangent6& xi) {
  const Eigen::Matrix3d jinv = so3_left_jacobian_inv(xi.rot);
  const Eigen::Matrix3d q = se3_q_matrix(xi.rot, xi.trans);
  Matrix6d out = Matrix6d::Zero();
  out.block<3, 3>(0, 0) = jinv;
  out.block<3, 3>(3, 3) = jinv;
  out.block<3, 3>(3, 0) = -jinv * q * jinv;
  return out;
}

}  // namespace

Matrix6d se3_right_jacobian_inv(const Tangent6& xi) {
  return se3_left_jacobian_inv({-xi.rot, -xi.trans});
}

}  // namespace sgraph::geom
