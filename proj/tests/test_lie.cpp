#include <doctest.h>

#include <random>

#include "sgraph/lie.hpp"

using namespace sgraph;
using geom::Pose;
using geom::Tangent6;

namespace {

std::mt19937_64 rng(7);

Eigen::Vector3d random_vec(double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {u(rng), u(rng), u(rng)};
}

}  // namespace

TEST_SUITE("lie") {

TEST_CASE("skew encodes the cross product") {
  for (int i = 0; i < 20; ++i) {
    const Eigen::Vector3d a = random_vec(2), b = random_vec(2);
    CHECK((geom::skew(a) * b - a.cross(b)).norm() < 1e-14);
    CHECK((geom::skew(a) + geom::skew(a).transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("so3 exp/log round trip") {
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector3d w = random_vec(1.0);
    CHECK((geom::so3_log(geom::so3_exp(w)) - w).norm() < 1e-10);
  }
  CHECK(geom::so3_exp(Eigen::Vector3d::Zero()).isIdentity(1e-15));
}

TEST_CASE("left Jacobian matches its defining first-order expansion") {
  // exp(w + d) ~= exp(Jl(w) d) * exp(w)
  for (int i = 0; i < 30; ++i) {
    const Eigen::Vector3d w = random_vec(1.5);
    const Eigen::Matrix3d jl = geom::so3_left_jacobian(w);
    for (int k = 0; k < 3; ++k) {
      const double h = 1e-7;
      const Eigen::Vector3d d = h * Eigen::Vector3d::Unit(k);
      const Eigen::Matrix3d lhs = geom::so3_exp(w + d);
      const Eigen::Matrix3d rhs = geom::so3_exp(jl * d) * geom::so3_exp(w);
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("left Jacobian inverse inverts the left Jacobian") {
  for (int i = 0; i < 50; ++i) {
    const Eigen::Vector3d w = random_vec(2.0);
    const Eigen::Matrix3d prod = geom::so3_left_jacobian(w) * geom::so3_left_jacobian_inv(w);
    CHECK((prod - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("adjoint conjugation identity") {
  for (int i = 0; i < 50; ++i) {
    const Pose t = geom::exp(Tangent6(random_vec(1.2), random_vec(2.0)));
    const Tangent6 xi(random_vec(0.3), random_vec(0.5));
    const Pose lhs = geom::compose(geom::compose(t, geom::exp(xi)), geom::inverse(t));
    const Tangent6 mapped = Tangent6::from_vector(geom::se3_adjoint(t) * xi.vector());
    CHECK(geom::boxminus(lhs, geom::exp(mapped)).norm() < 1e-9);
  }
}

TEST_CASE("right Jacobian inverse matches central differences of the log") {
  for (int i = 0; i < 50; ++i) {
    const Tangent6 xi(random_vec(1.5), random_vec(2.0));
    const Pose base = geom::exp(xi);
    const geom::Matrix6d jr_inv = geom::se3_right_jacobian_inv(geom::log(base));
    const double h = 1e-6;
    for (int k = 0; k < 6; ++k) {
      Eigen::Matrix<double, 6, 1> d = Eigen::Matrix<double, 6, 1>::Zero();
      d(k) = h;
      const auto plus = geom::log(geom::compose(base, geom::exp(Tangent6::from_vector(d))));
      d(k) = -h;
      const auto minus = geom::log(geom::compose(base, geom::exp(Tangent6::from_vector(d))));
      const Eigen::Matrix<double, 6, 1> col = (plus.vector() - minus.vector()) / (2 * h);
      CHECK((col - jr_inv.col(k)).norm() < 1e-5 * std::max(1.0, jr_inv.col(k).norm()));
    }
  }
}

}  // TEST_SUITE
