#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "sgraph/eval.hpp"

using namespace sgraph;
using namespace sgraph::eval;
using geom::Pose;

namespace {

std::mt19937_64 rng(31);

std::vector<TimedPose> figure_eight(int n) {
  std::vector<TimedPose> traj;
  for (int i = 0; i < n; ++i) {
    const double s = 0.2 * i;
    traj.push_back({static_cast<double>(i),
                    Pose::from_translation({std::sin(s), std::sin(2 * s), 0.1 * s})});
  }
  return traj;
}

std::vector<TimedPose> transformed(const std::vector<TimedPose>& traj, const Pose& t) {
  std::vector<TimedPose> out = traj;
  for (auto& p : out) p.pose = geom::compose(t, p.pose);
  return out;
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("associate intersects by exact timestamp") {
  std::vector<TimedPose> est = {{0, {}}, {1, {}}, {2, {}}, {3.5, {}}};
  std::vector<TimedPose> ref = {{0, {}}, {2, {}}, {3, {}}, {4, {}}};
  const TrajectoryPair pair = associate(est, ref);
  CHECK(pair.timestamps == std::vector<double>{0, 2});

  std::vector<TimedPose> lone = {{0, {}}, {10, {}}};
  CHECK_THROWS_AS(associate(lone, ref), EmptyAssociation);
}

TEST_CASE("align on clean correspondences") {
  const auto ref = figure_eight(40);
  SUBCASE("identical trajectories give the identity") {
    const Pose t = align(associate(ref, ref));
    CHECK(geom::boxminus(t, Pose::identity()).norm() < 1e-10);
  }
  SUBCASE("a shift is inverted exactly") {
    const auto est = transformed(ref, Pose::from_translation({1, 0, 0}));
    const TrajectoryPair pair = associate(est, ref);
    const Pose t = align(pair);
    CHECK((t.translation - Eigen::Vector3d(-1, 0, 0)).norm() < 1e-10);
    CHECK(ate(pair, true).rmse < 1e-10);
  }
  SUBCASE("a 30-degree yaw is recovered") {
    const Pose yaw{Eigen::Quaterniond(Eigen::AngleAxisd(M_PI / 6, Eigen::Vector3d::UnitZ())),
                   Eigen::Vector3d::Zero()};
    const auto est = transformed(ref, yaw);
    const Pose t = align(associate(est, ref));
    CHECK(geom::boxminus(t, geom::inverse(yaw)).norm() < 1e-9);
  }
  SUBCASE("degenerate inputs") {
    std::vector<TimedPose> two = {{0, {}}, {1, Pose::from_translation({1, 0, 0})}};
    CHECK_THROWS_AS(align(associate(two, two)), DegenerateAlignment);
    std::vector<TimedPose> line;
    for (int i = 0; i < 10; ++i)
      line.push_back({static_cast<double>(i), Pose::from_translation({1.0 * i, 0, 0})});
    CHECK_THROWS_AS(align(associate(line, line)), DegenerateAlignment);
  }
}

TEST_CASE("ate basics") {
  const auto ref = figure_eight(30);
  SUBCASE("identical trajectories") {
    const AteReport r = ate(associate(ref, ref), false);
    CHECK(r.rmse == 0.0);
    CHECK(r.std_dev == 0.0);
  }
  SUBCASE("constant offset, unaligned") {
    const auto est = transformed(ref, Pose::from_translation({1, 0, 0}));
    const AteReport r = ate(associate(est, ref), false);
    CHECK(r.rmse == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.std_dev == doctest::Approx(0.0).epsilon(1e-9));
    CHECK_FALSE(r.aligned);
  }
  SUBCASE("hand-computed error set {0, 0, 3, 4}") {
    std::vector<TimedPose> ref4, est4;
    const double offsets[] = {0, 0, 3, 4};
    for (int i = 0; i < 4; ++i) {
      ref4.push_back({static_cast<double>(i), Pose::from_translation({1.0 * i, 0, 0})});
      est4.push_back(
          {static_cast<double>(i), Pose::from_translation({1.0 * i, 0, offsets[i]})});
    }
    const AteReport r = ate(associate(est4, ref4), false);
    CHECK(r.rmse == 2.5);  // sqrt(25/4), exact in doubles
    CHECK(r.errors == std::vector<double>{0, 0, 3, 4});
  }
}

TEST_CASE("aligned ate is invariant under rigid transforms of the estimate") {
  const auto ref = figure_eight(50);
  std::vector<TimedPose> est = ref;
  std::normal_distribution<double> n(0.0, 0.1);
  for (auto& p : est) p.pose.translation += Eigen::Vector3d(n(rng), n(rng), n(rng));
  const double base = ate(associate(est, ref), true).rmse;
  for (int i = 0; i < 20; ++i) {
    const Pose t = helpers::random_pose(rng, 1.5, 5.0);
    const double moved = ate(associate(transformed(est, t), ref), true).rmse;
    CHECK(std::abs(moved - base) < 1e-9);
  }
}

TEST_CASE("bias-variance identity") {
  const auto ref = figure_eight(60);
  std::vector<TimedPose> est = ref;
  std::normal_distribution<double> n(0.0, 0.3);
  for (auto& p : est) p.pose.translation += Eigen::Vector3d(n(rng), n(rng), n(rng));
  for (bool do_align : {false, true}) {
    const AteReport r = ate(associate(est, ref), do_align);
    double mean = 0;
    for (double e : r.errors) mean += e;
    mean /= static_cast<double>(r.errors.size());
    CHECK(std::abs(r.rmse * r.rmse - (r.std_dev * r.std_dev + mean * mean)) < 1e-12);
  }
}

}  // TEST_SUITE
