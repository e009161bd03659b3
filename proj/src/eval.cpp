#include "sgraph/eval.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace sgraph::eval {

TrajectoryPair associate(const std::vector<TimedPose>& estimate,
                         const std::vector<TimedPose>& reference) {
  TrajectoryPair out;
  std::size_t ri = 0;
  for (const auto& e : estimate) {
    while (ri < reference.size() && reference[ri].t < e.t) ++ri;
    if (ri == reference.size()) break;
    if (reference[ri].t == e.t) {
      out.estimate.push_back(e.pose);
      out.reference.push_back(reference[ri].pose);
      out.timestamps.push_back(e.t);
    }
  }
  if (out.timestamps.size() < 2)
    throw EmptyAssociation("fewer than 2 associated pose pairs");
  for (std::size_t i = 1; i < out.timestamps.size(); ++i)
    if (!(out.timestamps[i] > out.timestamps[i - 1]))
      throw EmptyAssociation("associated timestamps are not strictly increasing");
  return out;
}

geom::Pose align(const TrajectoryPair& t) {
  const std::size_t n = t.estimate.size();
  if (n < 3) throw DegenerateAlignment("alignment needs at least 3 positions");

  Eigen::Vector3d mean_est = Eigen::Vector3d::Zero();
  Eigen::Vector3d mean_ref = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    mean_est += t.estimate[i].translation;
    mean_ref += t.reference[i].translation;
  }
  mean_est /= static_cast<double>(n);
  mean_ref /= static_cast<double>(n);

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < n; ++i)
    cov += (t.reference[i].translation - mean_ref) *
           (t.estimate[i].translation - mean_est).transpose();

  Eigen::JacobiSVD<Eigen::Matrix3d> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sigma = svd.singularValues();
  if (sigma(1) <= 1e-9 * std::max(sigma(0), 1e-30))
    throw DegenerateAlignment("positions are collinear or coincident");

  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0) d(2, 2) = -1.0;
  const Eigen::Matrix3d r = svd.matrixU() * d * svd.matrixV().transpose();
  return {Eigen::Quaterniond(r), mean_ref - r * mean_est};
}

AteReport ate(const TrajectoryPair& t, bool do_align) {
  AteReport report;
  report.aligned = do_align;
  const geom::Pose correction = do_align ? align(t) : geom::Pose::identity();

  double sum_sq = 0.0, sum = 0.0;
  report.errors.reserve(t.estimate.size());
  for (std::size_t i = 0; i < t.estimate.size(); ++i) {
    const Eigen::Vector3d p = correction * t.estimate[i].translation;
    const double e = (p - t.reference[i].translation).norm();
    report.errors.push_back(e);
    sum_sq += e * e;
    sum += e;
  }
  const double n = static_cast<double>(report.errors.size());
  report.rmse = std::sqrt(sum_sq / n);
  const double mean = sum / n;
  report.std_dev = std::sqrt(std::max(sum_sq / n - mean * mean, 0.0));
  return report;
}

}  // namespace sgraph::eval
