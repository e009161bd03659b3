#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sgraph/semantics.hpp"

namespace sgraph::sim {

/// Axis-aligned space footprint; walls are derived from it. Slot A is the
/// min-coordinate wall of its axis, slot B the max-coordinate wall; inward
/// normals point into the footprint.
struct SpaceSpec {
  int space_id = 0;
  semantics::SpaceKind kind = semantics::SpaceKind::kRoom;
  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  double zmin = 0, zmax = 2.5;
  Axis corridor_axis = Axis::kX;  // corridors: axis of the labeled wall pair
};

/// Wall marker placement in wall-surface coordinates.
struct MarkerPlacement {
  int marker_id = 0;
  semantics::WallKey wall;
  double along_frac = 0.5;  // fraction of the wall's horizontal extent
  double height = 0.8;      // z, meters
  double size = 0.08;
};

struct DoorSpec {
  int marker_id = 0;
  int parent_space_id = 0;  // space the doorway constraint attaches to
  geom::Pose frame_pose;    // on a wall, +z facing into the viewing side
  double size = 0.08;
};

struct Waypoint {
  double t = 0;  // seconds
  geom::Pose pose;
};

struct SceneSpec {
  std::string name;
  std::vector<SpaceSpec> spaces;
  std::vector<MarkerPlacement> wall_markers;
  std::vector<DoorSpec> doors;
  std::vector<Waypoint> trajectory;
};

/// Finite rectangle of one wall: support plane plus extents.
struct WallGeometry {
  geom::Plane plane;            // inward-canonical
  Eigen::Vector3d along;        // horizontal in-plane unit axis
  double lo = 0, hi = 0;        // extent along 'along'
  double zlo = 0, zhi = 0;      // vertical extent
  Eigen::Vector3d origin;       // point at (lo, z=0)
};

WallGeometry wall_geometry(const SpaceSpec& space, Axis axis, semantics::WallSlot slot);
geom::Pose wall_marker_pose(const SceneSpec& scene, const MarkerPlacement& m);

/// Id-only dictionary for the scene; uses no pose data.
semantics::SemanticDictionary derive_dictionary(const SceneSpec& scene);

/// Throws InvalidScene when extents, placements, trajectory, or the derived
/// dictionary are unusable.
void validate_scene(const SceneSpec& scene);

struct NoiseModel {
  double odom_rot_sigma = 0.5 * M_PI / 180.0;    // rad/step
  double odom_trans_sigma = 0.01;                // m/step
  double marker_rot_sigma = 0.2 * M_PI / 180.0;  // rad
  double marker_trans_sigma = 0.005;             // m
  double detection_range = 5.0;                  // m
  double detection_half_fov = M_PI / 4.0;        // rad
  std::uint64_t seed = 0;

  void validate() const;  // throws Error on out-of-range parameters
};

struct TimedPose {
  double t = 0;
  geom::Pose pose;
};

struct OdometryStep {
  double t_from = 0, t_to = 0;
  geom::Pose delta;  // relative pose measurement, previous frame to next
};

struct Detection {
  double t = 0;
  semantics::MarkerObservation obs;  // keyframe_id filled by the replayer
};

struct SimDataset {
  std::string scene_name;
  std::vector<TimedPose> ground_truth;  // gt[k+1] = gt[k] * true_delta[k]
  std::vector<OdometryStep> odometry;
  std::vector<Detection> detections;   // ordered by time, then marker id
  semantics::SemanticDictionary dictionary;
};

/// Deterministic for a fixed (scene, noise) pair. Markers are detected when
/// within range, inside the forward FOV cone (+x of the pose), and facing the
/// camera.
SimDataset generate(const SceneSpec& scene, const NoiseModel& noise);

/// Built-in layouts "seq01".."seq06". Throws UnknownTemplate.
SceneSpec template_scene(const std::string& name);
std::vector<std::string> template_names();

}  // namespace sgraph::sim
