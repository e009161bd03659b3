#pragma once

#include <Eigen/Core>

#include "sgraph/geometry.hpp"

namespace sgraph::geom {

using Matrix6d = Eigen::Matrix<double, 6, 6>;

/// skew(v) * u == v x u.
Eigen::Matrix3d skew(const Eigen::Vector3d& v);

Eigen::Matrix3d so3_exp(const Eigen::Vector3d& omega);
Eigen::Vector3d so3_log(const Eigen::Matrix3d& R);

/// Left Jacobian of SO(3) and its inverse.
Eigen::Matrix3d so3_left_jacobian(const Eigen::Vector3d& omega);
Eigen::Matrix3d so3_left_jacobian_inv(const Eigen::Vector3d& omega);

/// Adjoint of SE(3) in [rot; trans] block order:
/// T * exp(xi) * T^-1 == exp(adjoint(T) * xi).
Matrix6d se3_adjoint(const Pose& T);

/// Inverse right Jacobian of SE(3) in [rot; trans] block order:
/// log(exp(xi) * exp(delta)) ~= xi + se3_right_jacobian_inv(xi) * delta.
Matrix6d se3_right_jacobian_inv(const Tangent6& xi);

}  // namespace sgraph::geom
