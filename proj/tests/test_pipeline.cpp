#include <doctest.h>

#include <cstdlib>
#include <filesystem>

#include "sgraph/io.hpp"
#include "sgraph/optimizer.hpp"
#include "sgraph/pipeline.hpp"

using namespace sgraph;
namespace fs = std::filesystem;

namespace {

pipeline::RunConfig small_config(const std::string& scene, std::uint64_t seed) {
  pipeline::RunConfig cfg;
  cfg.scene_template = scene;
  cfg.noise.seed = seed;
  return cfg;
}

std::string slurp_tree(const fs::path& dir) {
  std::string all;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) all += f.filename().string() + "\n" + io::read_file(f.string());
  return all;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("replay builds the expected keyframe chain") {
  sim::NoiseModel noise;
  noise.seed = 2;
  const sim::SimDataset ds = sim::generate(sim::template_scene("seq06"), noise);
  semantics::SemanticsConfig cfg;
  const pipeline::ReplayResult r = pipeline::replay(ds, cfg);
  CHECK(r.graph.count_nodes(NodeKind::kKeyframe) == ds.odometry.size() + 1);
  CHECK(r.graph.count_factors(FactorKind::kOdometry) == ds.odometry.size());
  CHECK(r.graph.count_factors(FactorKind::kMarkerObs) == ds.detections.size());
  // gauge: exactly the first keyframe is fixed
  std::size_t fixed = 0;
  for (const auto& [id, n] : r.graph.nodes()) fixed += n.fixed;
  CHECK(fixed == 1);
  CHECK(r.graph.nodes().begin()->second.fixed);
}

TEST_CASE("run on seq06 improves the trajectory and reports both methods") {
  const pipeline::RunResult result = pipeline::run(small_config("seq06", 11));
  CHECK(result.semantic.ate_aligned.rmse < result.odometry.ate_aligned.rmse);
  CHECK(result.odometry.report.final_cost <= result.odometry.report.initial_cost);
  CHECK(result.semantic.report.converged);
  const std::string metrics = pipeline::write_metrics(result, 11);
  CHECK(metrics.find("odometry ") != std::string::npos);
  CHECK(metrics.find("semantic ") != std::string::npos);
  CHECK(metrics.find("rmse_m") != std::string::npos);
}

TEST_CASE("toggle monotonicity is validated") {
  pipeline::RunConfig cfg = small_config("seq06", 1);
  cfg.layers.walls = false;  // spaces still on
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.layers = {true, true, false, true};  // doorways without spaces
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.layers = {false, false, false, false};
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("scene source must be unambiguous") {
  pipeline::RunConfig cfg = small_config("seq06", 1);
  cfg.scene_file = "also_set.txt";
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.scene_template.clear();
  cfg.scene_file.clear();
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("run_and_write is byte-deterministic per seed") {
  const fs::path base = fs::temp_directory_path() / "sgraph_test_runs";
  fs::remove_all(base);
  pipeline::RunConfig cfg = small_config("seq06", 21);
  cfg.out_dir = (base / "a").string();
  pipeline::run_and_write(cfg);
  cfg.out_dir = (base / "b").string();
  pipeline::run_and_write(cfg);
  CHECK(slurp_tree(base / "a") == slurp_tree(base / "b"));

  cfg.noise.seed = 22;
  cfg.out_dir = (base / "c").string();
  pipeline::run_and_write(cfg);
  CHECK(slurp_tree(base / "a") != slurp_tree(base / "c"));
  fs::remove_all(base);
}

TEST_CASE("zero-noise run closes at zero cost") {
  pipeline::RunConfig cfg = small_config("seq06", 0);
  cfg.noise.odom_rot_sigma = 0;
  cfg.noise.odom_trans_sigma = 0;
  cfg.noise.marker_rot_sigma = 0;
  cfg.noise.marker_trans_sigma = 0;
  const pipeline::RunResult result = pipeline::run(cfg);
  CHECK(result.semantic.report.initial_cost < 1e-18);
  CHECK(result.semantic.ate_aligned.rmse < 1e-12);
}

#ifdef SGRAPH_CLI_PATH
TEST_CASE("command-line interface smoke") {
  const fs::path out = fs::temp_directory_path() / "sgraph_cli_smoke";
  fs::remove_all(out);
  const std::string cli = SGRAPH_CLI_PATH;
  auto run_cli = [&](const std::string& args) {
    return std::system((cli + " " + args + " > /dev/null 2>&1").c_str());
  };

  CHECK(run_cli("run --scene seq06 --seed 3 --out " + (out / "run").string()) == 0);
  CHECK(fs::exists(out / "run" / "metrics.txt"));
  CHECK(fs::exists(out / "run" / "graph_semantic.txt"));

  CHECK(run_cli("simulate --scene seq06 --seed 3 --out " + (out / "sim").string()) == 0);
  CHECK(fs::exists(out / "sim" / "dataset.txt"));

  CHECK(run_cli("evaluate --est " + (out / "run" / "traj_semantic.txt").string() + " --ref " +
                (out / "run" / "traj_gt.txt").string()) == 0);

  CHECK(run_cli("export --graph " + (out / "run" / "graph_semantic.txt").string() +
                " --format dot --out " + (out / "g.dot").string()) == 0);
  CHECK(fs::exists(out / "g.dot"));

  // validation failures exit with status 1
  auto exit_code = [&](const std::string& args) {
    const int status = run_cli(args);
    return WEXITSTATUS(status);
  };
  CHECK(exit_code("run --scene seq99 --seed 1 --out " + (out / "x").string()) == 1);
  CHECK(exit_code("run --scene seq06 --layers spaces --seed 1 --out " + (out / "y").string()) ==
        1);
  CHECK(exit_code("export --graph /nonexistent.txt") == 1);
  fs::remove_all(out);
}
#endif

}  // TEST_SUITE
