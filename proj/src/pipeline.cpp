#include "sgraph/pipeline.hpp"

#include <filesystem>
#include <limits>

#include "sgraph/factors.hpp"
#include "sgraph/io.hpp"

namespace sgraph::pipeline {

void RunConfig::validate() const {
  layers.validate();
  noise.validate();
  if (scene_template.empty() == scene_file.empty())
    throw ConfigError("exactly one of scene template or scene file must be given");
}

ReplayResult replay(const sim::SimDataset& ds, const semantics::SemanticsConfig& cfg) {
  if (ds.ground_truth.empty()) throw Error("dataset has no ground truth poses");
  ReplayResult out;

  // Keyframe chain anchored at the first ground-truth pose (gauge).
  geom::Pose estimate = ds.ground_truth.front().pose;
  Node first;
  first.value = KeyframeNode{estimate};
  first.fixed = true;
  NodeId current = out.graph.add_node(std::move(first));
  out.keyframe_by_time.emplace(ds.ground_truth.front().t, current);

  std::size_t next_det = 0;
  auto ingest_until = [&](double t_limit) {
    while (next_det < ds.detections.size() && ds.detections[next_det].t <= t_limit) {
      const sim::Detection& det = ds.detections[next_det++];
      if (!cfg.layers.markers) continue;
      auto kit = out.keyframe_by_time.find(det.t);
      if (kit == out.keyframe_by_time.end())
        throw UnknownKeyframe("detection timestamp has no keyframe");
      semantics::MarkerObservation obs = det.obs;
      obs.keyframe_id = kit->second;
      semantics::ingest(obs, ds.dictionary, out.ledger, out.graph, cfg);
      if (cfg.layers.spaces) {
        const semantics::DictEntry* entry = ds.dictionary.find(obs.marker_id);
        if (entry != nullptr)
          semantics::try_form_space(entry->space_id, ds.dictionary, out.ledger, out.graph, cfg);
      }
    }
  };

  ingest_until(ds.ground_truth.front().t);
  for (const auto& step : ds.odometry) {
    estimate = geom::compose(estimate, step.delta);
    Node kf;
    kf.value = KeyframeNode{estimate};
    const NodeId next = out.graph.add_node(std::move(kf));
    Factor f;
    f.kind = FactorKind::kOdometry;
    f.nodes = {current, next};
    f.measurement = step.delta;
    f.information = cfg.weights.odometry_info();
    out.graph.add_factor(std::move(f));
    out.keyframe_by_time.emplace(step.t_to, next);
    current = next;
    ingest_until(step.t_to);
  }
  ingest_until(std::numeric_limits<double>::infinity());

  if (cfg.layers.spaces)
    for (const auto& [space_id, info] : ds.dictionary.spaces)
      semantics::try_form_space(space_id, ds.dictionary, out.ledger, out.graph, cfg);
  return out;
}

std::vector<eval::TimedPose> keyframe_trajectory(const ReplayResult& r) {
  std::vector<eval::TimedPose> traj;
  traj.reserve(r.keyframe_by_time.size());
  for (const auto& [t, id] : r.keyframe_by_time)
    traj.push_back({t, std::get<KeyframeNode>(r.graph.node(id).value).pose});
  return traj;
}

namespace {

std::vector<eval::TimedPose> gt_trajectory(const sim::SimDataset& ds) {
  std::vector<eval::TimedPose> traj;
  traj.reserve(ds.ground_truth.size());
  for (const auto& g : ds.ground_truth) traj.push_back({g.t, g.pose});
  return traj;
}

MethodResult evaluate_method(const std::string& name, ReplayResult& r,
                             const sim::SimDataset& ds, const OptimizeConfig& opt_cfg,
                             SituationalGraph* graph_out) {
  MethodResult m;
  m.name = name;
  m.report = optimize(r.graph, opt_cfg);
  m.trajectory = keyframe_trajectory(r);
  const eval::TrajectoryPair pair = eval::associate(m.trajectory, gt_trajectory(ds));
  m.ate_aligned = eval::ate(pair, true);
  m.ate_raw = eval::ate(pair, false);
  if (graph_out) *graph_out = r.graph;
  return m;
}

}  // namespace

RunResult run(const RunConfig& cfg) {
  cfg.validate();
  RunResult result;
  result.scene = cfg.scene_file.empty() ? sim::template_scene(cfg.scene_template)
                                        : io::read_scene_file(cfg.scene_file);
  result.dataset = sim::generate(result.scene, cfg.noise);

  semantics::SemanticsConfig semantic_cfg;
  semantic_cfg.layers = cfg.layers;
  semantic_cfg.weights = cfg.weights;

  semantics::SemanticsConfig baseline_cfg;
  baseline_cfg.layers = {false, false, false, false};
  baseline_cfg.weights = cfg.weights;

  ReplayResult semantic_replay = replay(result.dataset, semantic_cfg);
  ReplayResult baseline_replay = replay(result.dataset, baseline_cfg);

  result.semantic = evaluate_method("semantic", semantic_replay, result.dataset, cfg.optimizer,
                                    &result.semantic_graph);
  result.odometry = evaluate_method("odometry", baseline_replay, result.dataset, cfg.optimizer,
                                    &result.odometry_graph);
  return result;
}

std::string write_metrics(const RunResult& result, std::uint64_t seed) {
  std::string out = "sgraph.metrics 1\n";
  out += "scene " + result.scene.name + " seed " + std::to_string(seed) + "\n";
  out += "method rmse_m std_m rmse_raw_m std_raw_m\n";
  for (const MethodResult* m : {&result.odometry, &result.semantic}) {
    out += m->name + ' ' + io::fmt(m->ate_aligned.rmse) + ' ' + io::fmt(m->ate_aligned.std_dev) +
           ' ' + io::fmt(m->ate_raw.rmse) + ' ' + io::fmt(m->ate_raw.std_dev) + '\n';
  }
  return out;
}

std::string write_report(const RunResult& result) {
  std::string out = "sgraph.report 1\n";
  for (const MethodResult* m : {&result.odometry, &result.semantic}) {
    out += "method " + m->name + " converged " + (m->report.converged ? "1" : "0") +
           " iterations " + std::to_string(m->report.iterations) + " initial_cost " +
           io::fmt(m->report.initial_cost) + " final_cost " + io::fmt(m->report.final_cost) +
           " grad_norm " + io::fmt(m->report.final_gradient_norm) + "\n";
    out += "trace";
    for (double c : m->report.cost_trace) out += ' ' + io::fmt(c);
    out += '\n';
  }
  return out;
}

RunResult run_and_write(const RunConfig& cfg) {
  RunResult result = run(cfg);
  if (cfg.out_dir.empty()) throw Error("run output needs an output directory");
  std::filesystem::create_directories(cfg.out_dir);
  const std::string d = cfg.out_dir + "/";

  io::write_file(d + "scene.txt", io::write_scene(result.scene));
  io::write_file(d + "dictionary.txt", io::write_dictionary(result.dataset.dictionary));
  io::write_file(d + "dataset.txt", io::write_dataset(result.dataset));
  io::write_file(d + "traj_gt.txt", io::write_trajectory(gt_trajectory(result.dataset)));
  io::write_file(d + "traj_odometry.txt", io::write_trajectory(result.odometry.trajectory));
  io::write_file(d + "traj_semantic.txt", io::write_trajectory(result.semantic.trajectory));
  io::write_file(d + "graph_odometry.txt", io::write_graph(result.odometry_graph));
  io::write_file(d + "graph_semantic.txt", io::write_graph(result.semantic_graph));
  io::write_file(d + "metrics.txt", write_metrics(result, cfg.noise.seed));
  io::write_file(d + "report.txt", write_report(result));
  return result;
}

}  // namespace sgraph::pipeline
