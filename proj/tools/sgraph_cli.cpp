// Command-line front end: simulate datasets, run the full pipeline, evaluate
// trajectories, export graphs. Exit codes: 0 success, 1 validation error,
// 2 runtime error.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "sgraph/io.hpp"
#include "sgraph/pipeline.hpp"

namespace {

using namespace sgraph;

struct CommonOpts {
  std::string scene;
  std::string scene_file;
  std::uint64_t seed = 0;
  sim::NoiseModel noise;
  std::string out_dir = "out";
};

void add_scene_opts(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--scene", o.scene, "Scene template name (seq01..seq06)");
  cmd->add_option("--scene-file", o.scene_file, "Scene file instead of a template");
  cmd->add_option("--seed", o.seed, "Random seed");
  cmd->add_option("--noise.odom-rot", o.noise.odom_rot_sigma, "Odometry rotation sigma, rad/step");
  cmd->add_option("--noise.odom-trans", o.noise.odom_trans_sigma,
                  "Odometry translation sigma, m/step");
  cmd->add_option("--noise.marker-rot", o.noise.marker_rot_sigma,
                  "Marker detection rotation sigma, rad");
  cmd->add_option("--noise.marker-trans", o.noise.marker_trans_sigma,
                  "Marker detection translation sigma, m");
  cmd->add_option("--noise.range", o.noise.detection_range, "Marker detection range, m");
  cmd->add_option("--noise.fov", o.noise.detection_half_fov, "Detection half-FOV, rad");
  cmd->add_option("--out", o.out_dir, "Output directory");
}

semantics::LayerToggles parse_layers(const std::string& spec) {
  semantics::LayerToggles t{false, false, false, false};
  if (spec == "all") return {};
  if (spec == "none") return t;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok == "markers")
      t.markers = true;
    else if (tok == "walls")
      t.walls = true;
    else if (tok == "spaces")
      t.spaces = true;
    else if (tok == "doorways")
      t.doorways = true;
    else if (!tok.empty())
      throw ConfigError("unknown layer '" + tok + "'");
  }
  t.validate();
  return t;
}

int cmd_simulate(const CommonOpts& o) {
  sim::SceneSpec scene;
  if (o.scene_file.empty() == o.scene.empty())
    throw ConfigError("exactly one of --scene or --scene-file must be given");
  scene = o.scene_file.empty() ? sim::template_scene(o.scene) : io::read_scene_file(o.scene_file);
  sim::NoiseModel noise = o.noise;
  noise.seed = o.seed;
  const sim::SimDataset ds = sim::generate(scene, noise);
  std::filesystem::create_directories(o.out_dir);
  io::write_file(o.out_dir + "/scene.txt", io::write_scene(scene));
  io::write_file(o.out_dir + "/dictionary.txt", io::write_dictionary(ds.dictionary));
  io::write_file(o.out_dir + "/dataset.txt", io::write_dataset(ds));
  std::cout << "wrote dataset with " << ds.ground_truth.size() << " poses and "
            << ds.detections.size() << " detections to " << o.out_dir << "\n";
  return 0;
}

int cmd_run(const CommonOpts& o, const std::string& layers, const pipeline::RunConfig& base) {
  pipeline::RunConfig cfg = base;
  cfg.scene_template = o.scene;
  cfg.scene_file = o.scene_file;
  cfg.noise = o.noise;
  cfg.noise.seed = o.seed;
  cfg.layers = parse_layers(layers);
  cfg.out_dir = o.out_dir;
  const pipeline::RunResult result = pipeline::run_and_write(cfg);
  std::cout << pipeline::write_metrics(result, cfg.noise.seed);
  return 0;
}

int cmd_evaluate(const std::string& est_file, const std::string& ref_file,
                 const std::string& out_file) {
  const auto est = io::read_trajectory_file(est_file);
  const auto ref = io::read_trajectory_file(ref_file);
  const eval::TrajectoryPair pair = eval::associate(est, ref);
  const eval::AteReport aligned = eval::ate(pair, true);
  const eval::AteReport raw = eval::ate(pair, false);
  std::string out = "sgraph.metrics 1\n";
  out += "method rmse_m std_m rmse_raw_m std_raw_m\n";
  out += "estimate " + io::fmt(aligned.rmse) + ' ' + io::fmt(aligned.std_dev) + ' ' +
         io::fmt(raw.rmse) + ' ' + io::fmt(raw.std_dev) + '\n';
  std::cout << out;
  if (!out_file.empty()) io::write_file(out_file, out);
  return 0;
}

int cmd_export(const std::string& graph_file, const std::string& format,
               const std::string& out_file) {
  const SituationalGraph g = io::read_graph_file(graph_file);
  std::string out;
  if (format == "text")
    out = io::write_graph(g);
  else if (format == "dot")
    out = io::write_graph_dot(g);
  else
    throw ConfigError("unknown export format '" + format + "'");
  if (out_file.empty())
    std::cout << out;
  else
    io::write_file(out_file, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Marker-based situational-graph SLAM backend"};
  app.require_subcommand(1);

  CommonOpts sim_opts;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic dataset");
  add_scene_opts(simulate, sim_opts);

  CommonOpts run_opts;
  std::string layers = "all";
  pipeline::RunConfig run_cfg;
  auto* run = app.add_subcommand("run", "Simulate, build, optimize, and evaluate");
  add_scene_opts(run, run_opts);
  run->add_option("--layers", layers,
                  "Semantic layers: comma list of markers,walls,spaces,doorways; or all/none");
  run->add_option("--max-iters", run_cfg.optimizer.max_iters, "Optimizer iteration cap");
  run->add_option("--g-tol", run_cfg.optimizer.g_tol, "Gradient norm tolerance");
  run->add_option("--f-tol", run_cfg.optimizer.f_tol, "Relative cost decrease tolerance");
  run->add_option("--lambda-init", run_cfg.optimizer.lambda_init, "Initial LM damping");
  run->add_option("--huber", run_cfg.optimizer.huber_delta, "Huber threshold (0 disables)");
  run->add_option("--info.odom-rot", run_cfg.weights.odometry_rot, "Odometry rotation weight");
  run->add_option("--info.odom-trans", run_cfg.weights.odometry_trans,
                  "Odometry translation weight");
  run->add_option("--info.marker-rot", run_cfg.weights.marker_rot, "Marker rotation weight");
  run->add_option("--info.marker-trans", run_cfg.weights.marker_trans,
                  "Marker translation weight");
  run->add_option("--info.wall-angle", run_cfg.weights.wall_angle, "Wall angle weight");
  run->add_option("--info.wall-dist", run_cfg.weights.wall_distance, "Wall distance weight");
  run->add_option("--info.space", run_cfg.weights.space, "Room/corridor center weight");
  run->add_option("--info.doorway", run_cfg.weights.doorway, "Doorway weight");

  std::string est_file, ref_file, eval_out;
  auto* evaluate = app.add_subcommand("evaluate", "ATE between two trajectory files");
  evaluate->add_option("--est", est_file, "Estimated trajectory file")->required();
  evaluate->add_option("--ref", ref_file, "Reference trajectory file")->required();
  evaluate->add_option("--out", eval_out, "Optional metrics output file");

  std::string graph_file, format = "text", export_out;
  auto* exp = app.add_subcommand("export", "Re-export a graph file");
  exp->add_option("--graph", graph_file, "Graph file")->required();
  exp->add_option("--format", format, "Output format: text or dot");
  exp->add_option("--out", export_out, "Output file (stdout if omitted)");

  try {
    app.parse(argc, argv);
    if (simulate->parsed()) return cmd_simulate(sim_opts);
    if (run->parsed()) return cmd_run(run_opts, layers, run_cfg);
    if (evaluate->parsed()) return cmd_evaluate(est_file, ref_file, eval_out);
    if (exp->parsed()) return cmd_export(graph_file, format, export_out);
    return 1;
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const InvalidTopology& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const InvalidScene& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const UnknownTemplate& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
