#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sgraph/graph.hpp"

namespace sgraph::semantics {

enum class EntityKind { kWall, kDoorway };
enum class WallSlot { kA, kB };

/// One wall of a space, identified independently of any pose. Two markers on
/// the same physical wall share a key.
struct WallKey {
  int space_id = 0;
  Axis axis = Axis::kX;
  WallSlot slot = WallSlot::kA;
  auto operator<=>(const WallKey&) const = default;
};

struct DictEntry {
  EntityKind entity_kind = EntityKind::kWall;
  int space_id = 0;
  Axis axis = Axis::kX;            // walls only
  WallSlot slot = WallSlot::kA;    // walls only
};

enum class SpaceKind { kCorridor, kRoom };

/// Id-only lookup of marker roles; deliberately carries no pose data.
struct SemanticDictionary {
  struct SpaceInfo {
    SpaceKind kind = SpaceKind::kRoom;
    Axis corridor_axis = Axis::kX;  // meaningful for corridors
  };

  std::map<int, DictEntry> entries;  // marker_id -> role
  std::map<int, SpaceInfo> spaces;   // derived during validation

  const DictEntry* find(int marker_id) const {
    auto it = entries.find(marker_id);
    return it == entries.end() ? nullptr : &it->second;
  }
};

/// Builds the derived space table and checks the topology: per space either
/// two wall slots on one axis (corridor) or two per axis (room); doorways
/// must reference a space that has walls. Throws InvalidTopology.
SemanticDictionary validate_dictionary(std::map<int, DictEntry> entries);

/// Parses the dictionary text format (see io.hpp for the grammar). Throws
/// ParseError on syntax problems, InvalidTopology via validation.
SemanticDictionary load_dictionary(std::istream& in);
SemanticDictionary load_dictionary_text(const std::string& text);
SemanticDictionary load_dictionary_file(const std::string& path);

struct MarkerObservation {
  int marker_id = 0;
  geom::Pose local_pose;  // marker in camera frame
  NodeId keyframe_id;     // filled in by the replayer
  double size = 0.0;      // meters
  std::vector<Eigen::Vector3d> nearby_points;  // camera frame, for plane refinement
};

/// Default information-matrix weights; marker-derived constraints dominate
/// odometry drift.
struct FactorWeights {
  double odometry_rot = 100.0;
  double odometry_trans = 100.0;
  double marker_rot = 400.0;
  double marker_trans = 400.0;
  double wall_angle = 100.0;
  double wall_distance = 400.0;
  double space = 25.0;
  double doorway = 25.0;

  Eigen::MatrixXd odometry_info() const;
  Eigen::MatrixXd marker_obs_info() const;
  Eigen::MatrixXd wall_marker_info() const;
  Eigen::MatrixXd space_info() const;
  Eigen::MatrixXd doorway_info() const;
};

/// Which semantic layers ingestion populates. Each layer requires the one
/// below it.
struct LayerToggles {
  bool markers = true;
  bool walls = true;
  bool spaces = true;
  bool doorways = true;

  /// Throws Error on a non-monotone toggle set.
  void validate() const;
};

struct SemanticsConfig {
  LayerToggles layers;
  FactorWeights weights;
};

/// Data-association state between the observation stream and the graph.
struct EntityLedger {
  std::map<int, NodeId> markers;    // marker_id -> Marker node
  std::map<WallKey, NodeId> walls;  // wall slot -> Wall node
  std::map<int, NodeId> spaces;     // space_id -> Room/Corridor node
  std::map<int, NodeId> doorways;   // marker_id -> Doorway node

  /// (marker_id, keyframe) pairs already ingested; gates repeated
  /// center-measurement events, not observation factors.
  std::set<std::pair<int, std::uint64_t>> seen_pairs;

  /// Frozen marker-center measurements awaiting corridor factors.
  std::map<int, std::vector<Eigen::Vector3d>> pending_corridor_centers;
  /// Doorway marker ids whose space factor is deferred until formation.
  std::map<int, std::vector<int>> pending_doorways;
  std::set<int> doorway_factor_added;  // doorway marker ids
};

struct IngestResult {
  std::vector<NodeId> new_nodes;
  std::vector<FactorId> new_factors;
};

/// Processes one marker observation: always associates or creates the Marker
/// node and adds the observation factor; populates wall and doorway layers
/// per the dictionary and toggles. Throws UnknownKeyframe if the observing
/// keyframe is not in the graph.
IngestResult ingest(const MarkerObservation& obs, const SemanticDictionary& dict,
                    EntityLedger& ledger, SituationalGraph& g, const SemanticsConfig& cfg = {});

/// Forms the Room or Corridor node of space_id once all of its declared walls
/// are mapped and pass the geometry checks, attaching the center factor(s)
/// and any deferred doorway factors. Once formed, later calls only drain new
/// corridor center measurements. Returns false (with reason) instead of
/// throwing on geometry-check failure.
bool try_form_space(int space_id, const SemanticDictionary& dict, EntityLedger& ledger,
                    SituationalGraph& g, const SemanticsConfig& cfg = {},
                    std::string* reason = nullptr);

}  // namespace sgraph::semantics
