#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sgraph/eval.hpp"
#include "sgraph/graph.hpp"
#include "sgraph/semantics.hpp"
#include "sgraph/simulator.hpp"

namespace sgraph::io {

/// 17 significant digits: prints doubles so that parsing returns the
/// identical value, making export/import/export byte-stable.
std::string fmt(double v);

std::string write_dictionary(const semantics::SemanticDictionary& dict);

std::string write_scene(const sim::SceneSpec& scene);
sim::SceneSpec read_scene(std::istream& in);
sim::SceneSpec read_scene_text(const std::string& text);
sim::SceneSpec read_scene_file(const std::string& path);

std::string write_dataset(const sim::SimDataset& ds);
sim::SimDataset read_dataset(std::istream& in);
sim::SimDataset read_dataset_text(const std::string& text);
sim::SimDataset read_dataset_file(const std::string& path);

std::string write_graph(const SituationalGraph& g);
SituationalGraph read_graph(std::istream& in);
SituationalGraph read_graph_text(const std::string& text);
SituationalGraph read_graph_file(const std::string& path);

/// Graphviz rendering of the layered graph.
std::string write_graph_dot(const SituationalGraph& g);

std::string write_trajectory(const std::vector<eval::TimedPose>& traj);
std::vector<eval::TimedPose> read_trajectory(std::istream& in);
std::vector<eval::TimedPose> read_trajectory_file(const std::string& path);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace sgraph::io
