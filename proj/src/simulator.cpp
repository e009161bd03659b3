#include "sgraph/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace sgraph::sim {

using semantics::SpaceKind;
using semantics::WallKey;
using semantics::WallSlot;

void NoiseModel::validate() const {
  if (odom_rot_sigma < 0 || odom_trans_sigma < 0 || marker_rot_sigma < 0 ||
      marker_trans_sigma < 0)
    throw ConfigError("noise sigmas must be non-negative");
  if (!(detection_range > 0)) throw ConfigError("detection range must be positive");
  if (!(detection_half_fov > 0) || detection_half_fov > M_PI / 2)
    throw ConfigError("detection half-FOV must be in (0, pi/2]");
}

WallGeometry wall_geometry(const SpaceSpec& space, Axis axis, WallSlot slot) {
  WallGeometry w;
  w.zlo = space.zmin;
  w.zhi = space.zmax;
  const Eigen::Vector3d up = Eigen::Vector3d::UnitZ();
  if (axis == Axis::kX) {
    const bool min_side = slot == WallSlot::kA;
    const double x = min_side ? space.xmin : space.xmax;
    const Eigen::Vector3d n = (min_side ? 1.0 : -1.0) * Eigen::Vector3d::UnitX();
    w.plane = geom::Plane(n, -n.x() * x);
    w.along = up.cross(n);
    w.origin = Eigen::Vector3d(x, min_side ? space.ymin : space.ymax, 0.0);
    w.lo = 0.0;
    w.hi = space.ymax - space.ymin;
  } else {
    const bool min_side = slot == WallSlot::kA;
    const double y = min_side ? space.ymin : space.ymax;
    const Eigen::Vector3d n = (min_side ? 1.0 : -1.0) * Eigen::Vector3d::UnitY();
    w.plane = geom::Plane(n, -n.y() * y);
    w.along = up.cross(n);
    w.origin = Eigen::Vector3d(min_side ? space.xmax : space.xmin, y, 0.0);
    w.lo = 0.0;
    w.hi = space.xmax - space.xmin;
  }
  return w;
}

namespace {

const SpaceSpec& find_space(const SceneSpec& scene, int space_id) {
  for (const auto& s : scene.spaces)
    if (s.space_id == space_id) return s;
  throw InvalidScene("marker references unknown space " + std::to_string(space_id));
}

geom::Pose pose_on_wall(const WallGeometry& w, double along_frac, double height) {
  const Eigen::Vector3d pos = w.origin + along_frac * (w.hi - w.lo) * w.along +
                              height * Eigen::Vector3d::UnitZ();
  Eigen::Matrix3d r;
  r.col(0) = w.along;
  r.col(1) = Eigen::Vector3d::UnitZ();
  r.col(2) = w.plane.normal;  // faces into the space
  return {Eigen::Quaterniond(r), pos};
}

}  // namespace

geom::Pose wall_marker_pose(const SceneSpec& scene, const MarkerPlacement& m) {
  const SpaceSpec& space = find_space(scene, m.wall.space_id);
  return pose_on_wall(wall_geometry(space, m.wall.axis, m.wall.slot), m.along_frac, m.height);
}

semantics::SemanticDictionary derive_dictionary(const SceneSpec& scene) {
  std::map<int, semantics::DictEntry> entries;
  for (const auto& m : scene.wall_markers) {
    semantics::DictEntry e;
    e.entity_kind = semantics::EntityKind::kWall;
    e.space_id = m.wall.space_id;
    e.axis = m.wall.axis;
    e.slot = m.wall.slot;
    if (!entries.emplace(m.marker_id, e).second)
      throw InvalidScene("duplicate marker id " + std::to_string(m.marker_id));
  }
  for (const auto& d : scene.doors) {
    semantics::DictEntry e;
    e.entity_kind = semantics::EntityKind::kDoorway;
    e.space_id = d.parent_space_id;
    if (!entries.emplace(d.marker_id, e).second)
      throw InvalidScene("duplicate marker id " + std::to_string(d.marker_id));
  }
  return semantics::validate_dictionary(std::move(entries));
}

namespace {

struct WallRect {
  WallGeometry geom;
};

std::vector<WallGeometry> space_walls(const SpaceSpec& s) {
  std::vector<WallGeometry> walls;
  if (s.kind == SpaceKind::kRoom) {
    for (Axis axis : {Axis::kX, Axis::kY})
      for (WallSlot slot : {WallSlot::kA, WallSlot::kB})
        walls.push_back(wall_geometry(s, axis, slot));
  } else {
    for (WallSlot slot : {WallSlot::kA, WallSlot::kB})
      walls.push_back(wall_geometry(s, s.corridor_axis, slot));
  }
  return walls;
}

// Host wall of an arbitrary on-wall pose; throws InvalidScene if none.
const WallGeometry find_host_wall(const SceneSpec& scene, const Eigen::Vector3d& pos) {
  for (const auto& s : scene.spaces) {
    for (const auto& w : space_walls(s)) {
      if (std::abs(w.plane.signed_distance(pos)) > 1e-9) continue;
      const double along = w.along.dot(pos - w.origin);
      if (along < w.lo - 1e-9 || along > w.hi + 1e-9) continue;
      if (pos.z() < w.zlo - 1e-9 || pos.z() > w.zhi + 1e-9) continue;
      return w;
    }
  }
  throw InvalidScene("marker pose does not lie on any wall");
}

}  // namespace

void validate_scene(const SceneSpec& scene) {
  std::set<int> space_ids;
  for (const auto& s : scene.spaces) {
    if (!(s.xmax > s.xmin) || !(s.ymax > s.ymin) || !(s.zmax > s.zmin))
      throw InvalidScene("space " + std::to_string(s.space_id) + " has non-positive extent");
    if (!space_ids.insert(s.space_id).second)
      throw InvalidScene("duplicate space id " + std::to_string(s.space_id));
  }
  for (const auto& m : scene.wall_markers) {
    if (!(m.size > 0)) throw InvalidScene("marker size must be positive");
    if (m.along_frac < 0 || m.along_frac > 1)
      throw InvalidScene("marker along_frac outside [0, 1]");
    const SpaceSpec& space = find_space(scene, m.wall.space_id);
    if (m.height < space.zmin || m.height > space.zmax)
      throw InvalidScene("marker height outside wall extent");
    if (space.kind == SpaceKind::kCorridor && m.wall.axis != space.corridor_axis)
      throw InvalidScene("corridor wall marker on unlabeled axis");
  }
  for (const auto& d : scene.doors) {
    if (!(d.size > 0)) throw InvalidScene("door marker size must be positive");
    find_host_wall(scene, d.frame_pose.translation);
  }
  if (scene.trajectory.size() < 2) throw InvalidScene("trajectory needs at least 2 waypoints");
  for (std::size_t i = 1; i < scene.trajectory.size(); ++i) {
    if (!(scene.trajectory[i].t > scene.trajectory[i - 1].t))
      throw InvalidScene("waypoint timestamps must be strictly increasing");
    const double step =
        (scene.trajectory[i].pose.translation - scene.trajectory[i - 1].pose.translation).norm();
    if (step < 1e-9) throw InvalidScene("consecutive waypoints must be distinct");
  }
  try {
    derive_dictionary(scene);
  } catch (const InvalidTopology& e) {
    throw InvalidScene(std::string("derived dictionary invalid: ") + e.what());
  }
}

namespace {

constexpr double kStepsPerMeter = 10.0;
constexpr double kMarkerPointRadius = 0.35;  // in-plane sampling half-extent
constexpr int kMarkerPointCount = 16;

geom::Pose heading_pose(const Eigen::Vector3d& pos, const Eigen::Vector3d& dir) {
  const double yaw = std::atan2(dir.y(), dir.x());
  return {Eigen::Quaterniond(Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ())), pos};
}

std::vector<TimedPose> interpolate_path(const std::vector<Waypoint>& waypoints) {
  std::vector<TimedPose> path;
  const Eigen::Vector3d first_dir =
      waypoints[1].pose.translation - waypoints[0].pose.translation;
  path.push_back({waypoints[0].t, heading_pose(waypoints[0].pose.translation, first_dir)});
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    const Eigen::Vector3d a = waypoints[i - 1].pose.translation;
    const Eigen::Vector3d b = waypoints[i].pose.translation;
    const Eigen::Vector3d dir = b - a;
    const int n = std::max(1, static_cast<int>(std::ceil(dir.norm() * kStepsPerMeter)));
    for (int k = 1; k <= n; ++k) {
      const double f = static_cast<double>(k) / n;
      const double t = waypoints[i - 1].t + f * (waypoints[i].t - waypoints[i - 1].t);
      path.push_back({t, heading_pose(a + f * dir, dir)});
    }
  }
  return path;
}

struct SimMarker {
  int marker_id = 0;
  geom::Pose pose;  // world
  double size = 0.0;
  WallGeometry host;
};

}  // namespace

SimDataset generate(const SceneSpec& scene, const NoiseModel& noise) {
  validate_scene(scene);
  noise.validate();

  std::vector<SimMarker> markers;
  for (const auto& m : scene.wall_markers) {
    const SpaceSpec& space = find_space(scene, m.wall.space_id);
    markers.push_back({m.marker_id, wall_marker_pose(scene, m), m.size,
                       wall_geometry(space, m.wall.axis, m.wall.slot)});
  }
  for (const auto& d : scene.doors)
    markers.push_back(
        {d.marker_id, d.frame_pose, d.size, find_host_wall(scene, d.frame_pose.translation)});
  std::sort(markers.begin(), markers.end(),
            [](const SimMarker& a, const SimMarker& b) { return a.marker_id < b.marker_id; });

  SimDataset out;
  out.scene_name = scene.name;
  out.dictionary = derive_dictionary(scene);

  const std::vector<TimedPose> ideal = interpolate_path(scene.trajectory);

  std::mt19937_64 rng(noise.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> in_plane(-kMarkerPointRadius, kMarkerPointRadius);
  auto noise_vec = [&](double sigma) {
    if (sigma == 0.0) return Eigen::Vector3d::Zero().eval();
    return Eigen::Vector3d(sigma * gauss(rng), sigma * gauss(rng), sigma * gauss(rng));
  };
  auto perturb = [&](const geom::Pose& p, double rot_sigma, double trans_sigma) {
    const Eigen::Vector3d rot_noise = noise_vec(rot_sigma);
    const Eigen::Vector3d trans_noise = noise_vec(trans_sigma);
    if (rot_noise.isZero(0.0) && trans_noise.isZero(0.0)) return p;
    return geom::boxplus(p, geom::Tangent6(rot_noise, trans_noise));
  };

  // Ground truth is the chained sequence of true deltas, so that a noiseless
  // odometry stream reproduces it bit for bit.
  out.ground_truth.push_back(ideal[0]);
  for (std::size_t k = 1; k < ideal.size(); ++k) {
    const geom::Pose delta =
        geom::compose(geom::inverse(ideal[k - 1].pose), ideal[k].pose);
    out.ground_truth.push_back(
        {ideal[k].t, geom::compose(out.ground_truth.back().pose, delta)});
    out.odometry.push_back(
        {ideal[k - 1].t, ideal[k].t, perturb(delta, noise.odom_rot_sigma, noise.odom_trans_sigma)});
  }

  for (const auto& [t, cam] : out.ground_truth) {
    const Eigen::Vector3d forward = cam.rotation * Eigen::Vector3d::UnitX();
    for (const auto& m : markers) {
      const Eigen::Vector3d to_marker = m.pose.translation - cam.translation;
      const double dist = to_marker.norm();
      if (dist == 0.0 || dist > noise.detection_range) continue;
      const Eigen::Vector3d view = to_marker / dist;
      const Eigen::Vector3d marker_normal = m.pose.rotation * Eigen::Vector3d::UnitZ();
      if (marker_normal.dot(view) >= 0.0) continue;  // back side
      if (forward.dot(view) < std::cos(noise.detection_half_fov)) continue;

      Detection det;
      det.t = t;
      det.obs.marker_id = m.marker_id;
      det.obs.size = m.size;
      const geom::Pose local = geom::compose(geom::inverse(cam), m.pose);
      det.obs.local_pose = perturb(local, noise.marker_rot_sigma, noise.marker_trans_sigma);

      // Points on the host wall around the marker, camera frame.
      const geom::Pose cam_inv = geom::inverse(cam);
      const double marker_along = m.host.along.dot(m.pose.translation - m.host.origin);
      det.obs.nearby_points.reserve(kMarkerPointCount);
      for (int i = 0; i < kMarkerPointCount; ++i) {
        const double da = in_plane(rng);
        const double dz = in_plane(rng);
        const double along = std::clamp(marker_along + da, m.host.lo, m.host.hi);
        const double z = std::clamp(m.pose.translation.z() + dz, m.host.zlo, m.host.zhi);
        Eigen::Vector3d p = m.host.origin + along * m.host.along + z * Eigen::Vector3d::UnitZ();
        p += noise_vec(noise.marker_trans_sigma);
        det.obs.nearby_points.push_back(cam_inv * p);
      }
      out.detections.push_back(std::move(det));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Template layouts. Rooms are 4 m x 6 m and corridors 2 m wide (10 m long
// unless the topology needs more); markers are 8 cm, mounted at z = 0.8 m.
// Corridor wall markers face each other at the corridor midpoint so their
// center measurements agree. The sensor travels at 1 m/s, z = 0.8 m.
// ---------------------------------------------------------------------------

namespace {

constexpr double kMarkerHeight = 0.8;
constexpr double kMarkerSize = 0.08;
constexpr double kRoomMarkerFrac = 0.35;

struct TemplateBuilder {
  SceneSpec scene;
  int next_marker = 1;

  void room(int space_id, double xmin, double xmax, double ymin, double ymax) {
    scene.spaces.push_back(
        {space_id, SpaceKind::kRoom, xmin, xmax, ymin, ymax, 0.0, 2.5, Axis::kX});
    for (Axis axis : {Axis::kX, Axis::kY})
      for (WallSlot slot : {WallSlot::kA, WallSlot::kB})
        scene.wall_markers.push_back({next_marker++, WallKey{space_id, axis, slot},
                                      kRoomMarkerFrac, kMarkerHeight, kMarkerSize});
  }

  void corridor(int space_id, double xmin, double xmax, double ymin, double ymax, Axis axis) {
    scene.spaces.push_back(
        {space_id, SpaceKind::kCorridor, xmin, xmax, ymin, ymax, 0.0, 2.5, axis});
    for (WallSlot slot : {WallSlot::kA, WallSlot::kB})
      scene.wall_markers.push_back(
          {next_marker++, WallKey{space_id, axis, slot}, 0.5, kMarkerHeight, kMarkerSize});
  }

  void door(int host_space, Axis axis, WallSlot slot, double frac, int parent_space) {
    const SpaceSpec& host = find_space(scene, host_space);
    DoorSpec d;
    d.marker_id = next_marker++;
    d.parent_space_id = parent_space;
    d.frame_pose = pose_on_wall(wall_geometry(host, axis, slot), frac, kMarkerHeight);
    d.size = kMarkerSize;
    scene.doors.push_back(d);
  }

  void path(const std::vector<std::pair<double, double>>& xy) {
    double t = 0.0;
    Eigen::Vector3d prev = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < xy.size(); ++i) {
      const Eigen::Vector3d pos(xy[i].first, xy[i].second, kMarkerHeight);
      if (i > 0) t += (pos - prev).norm();  // 1 m/s
      scene.trajectory.push_back({t, geom::Pose(Eigen::Quaterniond::Identity(), pos)});
      prev = pos;
    }
  }
};

SceneSpec build_seq01() {
  TemplateBuilder b;
  b.scene.name = "seq01";
  b.room(1, 0, 4, 0, 6);
  b.room(2, 4, 8, 0, 6);
  b.door(1, Axis::kX, WallSlot::kB, 0.5, 1);  // shared wall x = 4
  b.path({{1, 1}, {3, 1}, {3, 5}, {1, 5}, {1, 3}, {3.5, 3}, {4.5, 3}, {7, 3}, {7, 1},
          {5, 1}, {5, 5}, {7, 5}, {7, 3}, {4.5, 3}, {3.5, 3}, {1, 3}, {1, 1}});
  return b.scene;
}

SceneSpec build_seq02() {
  TemplateBuilder b;
  b.scene.name = "seq02";
  b.corridor(1, 0, 2, 0, 10, Axis::kX);
  b.room(2, 2, 6, 2, 8);
  b.corridor(3, 6, 8, 0, 10, Axis::kX);
  b.door(2, Axis::kX, WallSlot::kA, 0.5, 2);
  b.door(2, Axis::kX, WallSlot::kB, 0.5, 3);
  b.path({{1, 1}, {1, 9}, {1, 5}, {3, 5}, {3, 3}, {5, 3}, {5, 7}, {3, 7}, {3, 5}, {5, 5},
          {7, 5}, {7, 9}, {7, 1}, {7, 5}, {5, 5}, {3, 5}, {1, 5}, {1, 1}});
  return b.scene;
}

SceneSpec build_seq03() {
  TemplateBuilder b;
  b.scene.name = "seq03";
  b.corridor(1, 4, 6, 0, 18, Axis::kX);  // lengthened to host five doors
  b.room(2, 0, 4, 0, 6);
  b.room(3, 0, 4, 6, 12);
  b.room(4, 0, 4, 12, 18);
  b.room(5, 6, 10, 0, 6);
  b.room(6, 6, 10, 6, 12);
  b.door(2, Axis::kX, WallSlot::kB, 0.5, 2);
  b.door(3, Axis::kX, WallSlot::kB, 0.5, 3);
  b.door(4, Axis::kX, WallSlot::kB, 0.5, 4);
  b.door(5, Axis::kX, WallSlot::kA, 0.5, 5);
  b.door(6, Axis::kX, WallSlot::kA, 0.5, 6);
  b.path({{5, 0.5}, {5, 3},  {2, 2},  {1.2, 3},  {2, 4},  {5, 3},  {5, 9},  {2, 8},
          {1.2, 9}, {2, 10}, {5, 9},  {5, 15},   {2, 14}, {1.2, 15}, {2, 16}, {5, 15},
          {5, 9},   {8, 10}, {8.8, 9}, {8, 8},   {5, 9},  {5, 3},  {8, 4},  {8.8, 3},
          {8, 2},   {5, 3},  {5, 0.5}});
  return b.scene;
}

SceneSpec build_seq04() {
  TemplateBuilder b;
  b.scene.name = "seq04";
  b.corridor(1, 0, 2, 0, 10, Axis::kX);
  b.room(2, 0, 4, 10, 16);  // landing area
  b.corridor(3, 4, 14, 12, 14, Axis::kY);
  b.door(2, Axis::kY, WallSlot::kA, 0.25, 2);
  b.door(2, Axis::kX, WallSlot::kB, 0.5, 3);
  b.path({{1, 0.5}, {1, 9}, {1.5, 10.5}, {2, 12.8}, {5, 13}, {13, 12.6}, {13.4, 13},
          {13, 13.4}, {5, 13.2}, {2, 13.2}, {1.5, 10.5}, {1, 9}, {1, 0.5}});
  return b.scene;
}

SceneSpec build_seq05() {
  TemplateBuilder b;
  b.scene.name = "seq05";
  b.corridor(1, 0, 12, 10, 12, Axis::kY);  // north
  b.corridor(2, 10, 12, 2, 10, Axis::kX);  // east
  b.corridor(3, 0, 12, 0, 2, Axis::kY);    // south
  b.corridor(4, 0, 2, 2, 10, Axis::kX);    // west
  b.room(5, 12, 16, 4, 10);
  b.door(5, Axis::kX, WallSlot::kA, 0.5, 5);  // room wall x = 12
  // The final leg re-enters the south corridor so its markers are
  // re-observed and the ring closes.
  b.path({{1, 1}, {11, 1}, {11, 7}, {13, 7}, {14, 5.5}, {15, 7}, {14, 8.5}, {13, 7.2},
          {11, 7}, {11, 11}, {1, 11}, {1, 1}, {8, 1}});
  return b.scene;
}

SceneSpec build_seq06() {
  TemplateBuilder b;
  b.scene.name = "seq06";
  b.room(1, 0, 4, 0, 6);
  b.corridor(2, 4, 6, 0, 10, Axis::kX);
  b.door(1, Axis::kX, WallSlot::kB, 0.5, 1);
  b.path({{1, 1}, {3, 1}, {3, 5}, {1, 5}, {1, 3}, {3.5, 3}, {5, 3}, {5, 9}, {5.5, 9.4},
          {5, 9.8}, {4.5, 9.4}, {5, 9}, {5, 3}, {3.5, 3}, {1, 3}, {1, 1}});
  return b.scene;
}

}  // namespace

SceneSpec template_scene(const std::string& name) {
  if (name == "seq01") return build_seq01();
  if (name == "seq02") return build_seq02();
  if (name == "seq03") return build_seq03();
  if (name == "seq04") return build_seq04();
  if (name == "seq05") return build_seq05();
  if (name == "seq06") return build_seq06();
  throw UnknownTemplate("unknown scene template '" + name + "'");
}

std::vector<std::string> template_names() {
  return {"seq01", "seq02", "seq03", "seq04", "seq05", "seq06"};
}

}  // namespace sgraph::sim
