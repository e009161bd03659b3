#pragma once

#include <map>
#include <string>

#include "sgraph/eval.hpp"
#include "sgraph/optimizer.hpp"
#include "sgraph/semantics.hpp"
#include "sgraph/simulator.hpp"

namespace sgraph::pipeline {

struct RunConfig {
  std::string scene_template;  // one of sim::template_names()
  std::string scene_file;      // alternative to scene_template
  sim::NoiseModel noise;       // includes the seed
  semantics::FactorWeights weights;
  OptimizeConfig optimizer;
  semantics::LayerToggles layers;
  std::string out_dir;

  /// Throws Error on a non-monotone toggle set or missing scene source.
  void validate() const;
};

/// Graph built from a dataset event stream plus the association state.
struct ReplayResult {
  SituationalGraph graph;
  semantics::EntityLedger ledger;
  std::map<double, NodeId> keyframe_by_time;
};

/// Replays odometry steps into a fixed-gauge keyframe chain and detections
/// through semantic ingestion (per the toggles). Deterministic.
ReplayResult replay(const sim::SimDataset& ds, const semantics::SemanticsConfig& cfg);

/// Keyframe trajectory of a replayed/optimized graph, in time order.
std::vector<eval::TimedPose> keyframe_trajectory(const ReplayResult& r);

struct MethodResult {
  std::string name;
  OptimizeReport report;
  std::vector<eval::TimedPose> trajectory;
  eval::AteReport ate_aligned;
  eval::AteReport ate_raw;
};

struct RunResult {
  sim::SceneSpec scene;
  sim::SimDataset dataset;
  MethodResult odometry;  // odometry-only baseline
  MethodResult semantic;  // configured toggle set
  SituationalGraph odometry_graph;
  SituationalGraph semantic_graph;
};

/// Full pipeline: simulate, replay with and without semantic layers,
/// optimize, evaluate against ground truth.
RunResult run(const RunConfig& cfg);

/// run() plus the artifact tree under cfg.out_dir (scene, dictionary,
/// dataset, graphs, trajectories, metrics, report). Byte-deterministic for a
/// fixed config.
RunResult run_and_write(const RunConfig& cfg);

std::string write_metrics(const RunResult& result, std::uint64_t seed);
std::string write_report(const RunResult& result);

}  // namespace sgraph::pipeline
