#pragma once

#include <vector>

#include "sgraph/geometry.hpp"

namespace sgraph::eval {

struct TimedPose {
  double t = 0;
  geom::Pose pose;
};

/// Estimate and reference associated by identical timestamps.
struct TrajectoryPair {
  std::vector<geom::Pose> estimate;
  std::vector<geom::Pose> reference;
  std::vector<double> timestamps;
};

/// Associates by exact timestamp equality; requires at least two pairs with
/// strictly increasing timestamps. Throws EmptyAssociation.
TrajectoryPair associate(const std::vector<TimedPose>& estimate,
                         const std::vector<TimedPose>& reference);

struct AteReport {
  double rmse = 0;                 // meters
  double std_dev = 0;              // population standard deviation, meters
  std::vector<double> errors;      // per-pose translational errors
  bool aligned = false;
};

/// Closed-form least-squares rigid transform (rotation + translation, no
/// scale) minimizing sum ||R p_est + t - p_ref||^2. Needs >= 3 non-collinear
/// positions; throws DegenerateAlignment.
geom::Pose align(const TrajectoryPair& t);

/// Absolute trajectory error over the association, optionally after rigid
/// alignment.
AteReport ate(const TrajectoryPair& t, bool do_align);

}  // namespace sgraph::eval
