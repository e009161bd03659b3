#include "sgraph/semantics.hpp"

#include <fstream>
#include <sstream>

#include "sgraph/factors.hpp"

namespace sgraph::semantics {

SemanticDictionary validate_dictionary(std::map<int, DictEntry> entries) {
  SemanticDictionary dict;
  dict.entries = std::move(entries);

  // Group wall slots per space.
  std::map<int, std::set<std::pair<Axis, WallSlot>>> slots;
  for (const auto& [id, e] : dict.entries)
    if (e.entity_kind == EntityKind::kWall) slots[e.space_id].insert({e.axis, e.slot});

  for (const auto& [space_id, s] : slots) {
    const bool xa = s.count({Axis::kX, WallSlot::kA}), xb = s.count({Axis::kX, WallSlot::kB});
    const bool ya = s.count({Axis::kY, WallSlot::kA}), yb = s.count({Axis::kY, WallSlot::kB});
    SemanticDictionary::SpaceInfo info;
    if (xa && xb && ya && yb) {
      info.kind = SpaceKind::kRoom;
    } else if (xa && xb && !ya && !yb) {
      info.kind = SpaceKind::kCorridor;
      info.corridor_axis = Axis::kX;
    } else if (ya && yb && !xa && !xb) {
      info.kind = SpaceKind::kCorridor;
      info.corridor_axis = Axis::kY;
    } else {
      throw InvalidTopology("space " + std::to_string(space_id) +
                            " must declare two wall slots on one axis or two per axis");
    }
    dict.spaces.emplace(space_id, info);
  }

  for (const auto& [id, e] : dict.entries) {
    if (e.entity_kind == EntityKind::kDoorway && !dict.spaces.count(e.space_id))
      throw InvalidTopology("doorway marker " + std::to_string(id) +
                            " references space without walls");
  }
  return dict;
}

namespace {

Axis parse_axis(const std::string& tok) {
  if (tok == "x") return Axis::kX;
  if (tok == "y") return Axis::kY;
  throw ParseError("bad axis token '" + tok + "'");
}

WallSlot parse_slot(const std::string& tok) {
  if (tok == "a") return WallSlot::kA;
  if (tok == "b") return WallSlot::kB;
  throw ParseError("bad slot token '" + tok + "'");
}

}  // namespace

SemanticDictionary load_dictionary(std::istream& in) {
  std::string header;
  if (!std::getline(in, header) || header != "sgraph.dict 1")
    throw ParseError("dictionary must start with 'sgraph.dict 1'");

  std::map<int, DictEntry> entries;
  // Slots occupied per (space, axis) for declaration-order auto assignment.
  std::map<std::pair<int, Axis>, std::set<WallSlot>> used;

  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tag, kind, space_kw;
    int marker_id = 0, space_id = 0;
    if (!(ls >> tag >> marker_id >> kind >> space_kw >> space_id) || tag != "marker" ||
        space_kw != "space")
      throw ParseError("dictionary line " + std::to_string(line_no) + ": bad syntax");
    if (entries.count(marker_id))
      throw ParseError("duplicate marker id " + std::to_string(marker_id));

    DictEntry e;
    e.space_id = space_id;
    if (kind == "doorway") {
      e.entity_kind = EntityKind::kDoorway;
      entries.emplace(marker_id, e);
      continue;
    }
    if (kind != "wall") throw ParseError("dictionary line " + std::to_string(line_no) +
                                         ": entity kind must be wall or doorway");
    e.entity_kind = EntityKind::kWall;

    std::string axis_kw, axis_tok;
    if (!(ls >> axis_kw >> axis_tok) || axis_kw != "axis")
      throw ParseError("dictionary line " + std::to_string(line_no) + ": missing axis");
    e.axis = parse_axis(axis_tok);

    std::string slot_kw;
    auto& taken = used[{space_id, e.axis}];
    if (ls >> slot_kw) {
      std::string slot_tok;
      if (slot_kw != "slot" || !(ls >> slot_tok))
        throw ParseError("dictionary line " + std::to_string(line_no) + ": bad slot clause");
      e.slot = parse_slot(slot_tok);
    } else if (!taken.count(WallSlot::kA)) {
      e.slot = WallSlot::kA;
    } else if (!taken.count(WallSlot::kB)) {
      e.slot = WallSlot::kB;
    } else {
      throw InvalidTopology("space " + std::to_string(space_id) +
                            " declares more than two walls on one axis");
    }
    taken.insert(e.slot);
    entries.emplace(marker_id, e);
  }
  return validate_dictionary(std::move(entries));
}

SemanticDictionary load_dictionary_text(const std::string& text) {
  std::istringstream in(text);
  return load_dictionary(in);
}

SemanticDictionary load_dictionary_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open dictionary file " + path);
  return load_dictionary(in);
}

Eigen::MatrixXd FactorWeights::odometry_info() const {
  Eigen::VectorXd d(6);
  d << odometry_rot, odometry_rot, odometry_rot, odometry_trans, odometry_trans, odometry_trans;
  return d.asDiagonal();
}

Eigen::MatrixXd FactorWeights::marker_obs_info() const {
  Eigen::VectorXd d(6);
  d << marker_rot, marker_rot, marker_rot, marker_trans, marker_trans, marker_trans;
  return d.asDiagonal();
}

Eigen::MatrixXd FactorWeights::wall_marker_info() const {
  Eigen::VectorXd d(3);
  d << wall_angle, wall_angle, wall_distance;
  return d.asDiagonal();
}

Eigen::MatrixXd FactorWeights::space_info() const {
  return space * Eigen::MatrixXd::Identity(3, 3);
}

Eigen::MatrixXd FactorWeights::doorway_info() const {
  return doorway * Eigen::MatrixXd::Identity(3, 3);
}

void LayerToggles::validate() const {
  if (walls && !markers) throw ConfigError("layer 'walls' requires 'markers'");
  if (spaces && !walls) throw ConfigError("layer 'spaces' requires 'walls'");
  if (doorways && !spaces) throw ConfigError("layer 'doorways' requires 'spaces'");
}

namespace {

const geom::Pose& keyframe_pose(const SituationalGraph& g, NodeId id) {
  if (!g.has_node(id)) throw UnknownKeyframe("keyframe " + std::to_string(id.value) + " not in graph");
  const Node& n = g.node(id);
  if (n.kind() != NodeKind::kKeyframe)
    throw UnknownKeyframe("node " + std::to_string(id.value) + " is not a keyframe");
  return std::get<KeyframeNode>(n.value).pose;
}

Eigen::Vector3d space_center(const SituationalGraph& g, NodeId id) {
  const Node& n = g.node(id);
  if (n.kind() == NodeKind::kRoom) return std::get<RoomNode>(n.value).center;
  return std::get<CorridorNode>(n.value).center;
}

void add_doorway_factor(int doorway_marker_id, NodeId space_node, EntityLedger& ledger,
                        SituationalGraph& g, const SemanticsConfig& cfg, IngestResult* out) {
  if (ledger.doorway_factor_added.count(doorway_marker_id)) return;
  const NodeId door_node = ledger.doorways.at(doorway_marker_id);
  const auto& door = std::get<DoorwayNode>(g.node(door_node).value);
  Factor f;
  f.kind = FactorKind::kDoorwayRoom;
  f.nodes = {door_node, space_node};
  // measurement frozen from the estimates at association time
  f.measurement = Eigen::Vector3d(door.pose.translation - space_center(g, space_node));
  f.information = cfg.weights.doorway_info();
  const FactorId fid = g.add_factor(std::move(f));
  if (out) out->new_factors.push_back(fid);
  ledger.doorway_factor_added.insert(doorway_marker_id);
}

}  // namespace

IngestResult ingest(const MarkerObservation& obs, const SemanticDictionary& dict,
                    EntityLedger& ledger, SituationalGraph& g, const SemanticsConfig& cfg) {
  IngestResult result;
  const geom::Pose kf_pose = keyframe_pose(g, obs.keyframe_id);
  const geom::Pose marker_global = geom::compose(kf_pose, obs.local_pose);

  // Marker node: associate or create at the current keyframe estimate.
  NodeId marker_node;
  auto mit = ledger.markers.find(obs.marker_id);
  if (mit != ledger.markers.end()) {
    marker_node = mit->second;
  } else {
    Node n;
    n.value = MarkerNode{marker_global, obs.marker_id, obs.size};
    marker_node = g.add_node(std::move(n));
    ledger.markers.emplace(obs.marker_id, marker_node);
    result.new_nodes.push_back(marker_node);
  }

  {
    Factor f;
    f.kind = FactorKind::kMarkerObs;
    f.nodes = {obs.keyframe_id, marker_node};
    f.measurement = obs.local_pose;
    f.information = cfg.weights.marker_obs_info();
    result.new_factors.push_back(g.add_factor(std::move(f)));
  }

  const bool new_pair =
      ledger.seen_pairs.insert({obs.marker_id, obs.keyframe_id.value}).second;

  const DictEntry* entry = dict.find(obs.marker_id);
  if (entry == nullptr) return result;  // unlisted marker: pure landmark

  if (entry->entity_kind == EntityKind::kWall && cfg.layers.walls) {
    const WallKey key{entry->space_id, entry->axis, entry->slot};
    NodeId wall_node;
    auto wit = ledger.walls.find(key);
    if (wit != ledger.walls.end()) {
      wall_node = wit->second;
    } else {
      geom::Plane plane =
          geom::canonicalize(geom::plane_from_marker(marker_global), kf_pose.translation);
      if (!obs.nearby_points.empty()) {
        std::vector<Eigen::Vector3d> global_points;
        global_points.reserve(obs.nearby_points.size());
        for (const auto& p : obs.nearby_points) global_points.push_back(kf_pose * p);
        plane = geom::plane_refine(global_points, plane);
      }
      Node n;
      n.value = WallNode{geom::plane_to_spherical(plane)};
      wall_node = g.add_node(std::move(n));
      ledger.walls.emplace(key, wall_node);
      result.new_nodes.push_back(wall_node);
    }

    Factor f;
    f.kind = FactorKind::kWallMarker;
    f.nodes = {marker_node, wall_node};
    f.information = cfg.weights.wall_marker_info();
    result.new_factors.push_back(g.add_factor(std::move(f)));

    if (cfg.layers.spaces && new_pair &&
        dict.spaces.at(entry->space_id).kind == SpaceKind::kCorridor) {
      const auto& marker = std::get<MarkerNode>(g.node(marker_node).value);
      ledger.pending_corridor_centers[entry->space_id].push_back(marker.pose.translation);
    }
  }

  if (entry->entity_kind == EntityKind::kDoorway && cfg.layers.doorways) {
    auto dit = ledger.doorways.find(obs.marker_id);
    if (dit == ledger.doorways.end()) {
      Node n;
      n.value = DoorwayNode{marker_global};
      const NodeId door_node = g.add_node(std::move(n));
      ledger.doorways.emplace(obs.marker_id, door_node);
      result.new_nodes.push_back(door_node);

      auto sit = ledger.spaces.find(entry->space_id);
      if (sit != ledger.spaces.end()) {
        add_doorway_factor(obs.marker_id, sit->second, ledger, g, cfg, &result);
      } else {
        ledger.pending_doorways[entry->space_id].push_back(obs.marker_id);
      }
    }
  }

  return result;
}

bool try_form_space(int space_id, const SemanticDictionary& dict, EntityLedger& ledger,
                    SituationalGraph& g, const SemanticsConfig& cfg, std::string* reason) {
  auto set_reason = [&](const std::string& r) {
    if (reason) *reason = r;
  };
  auto sit = dict.spaces.find(space_id);
  if (sit == dict.spaces.end()) {
    set_reason("space not declared in dictionary");
    return false;
  }
  const auto& info = sit->second;

  auto wall = [&](Axis axis, WallSlot slot) -> const NodeId* {
    auto it = ledger.walls.find(WallKey{space_id, axis, slot});
    return it == ledger.walls.end() ? nullptr : &it->second;
  };
  auto plane_of = [&](NodeId id) {
    return geom::spherical_to_plane(std::get<WallNode>(g.node(id).value).plane);
  };

  // Drain corridor center measurements into factors for a formed space.
  auto drain_corridor = [&](NodeId space_node, NodeId wa, NodeId wb) {
    auto& pending = ledger.pending_corridor_centers[space_id];
    for (const auto& c : pending) {
      Factor f;
      f.kind = FactorKind::kCorridor;
      f.nodes = {space_node, wa, wb};
      f.measurement = c;
      f.information = cfg.weights.space_info();
      g.add_factor(std::move(f));
    }
    pending.clear();
  };

  auto formed_it = ledger.spaces.find(space_id);
  if (formed_it != ledger.spaces.end()) {
    if (info.kind == SpaceKind::kCorridor) {
      const NodeId* wa = wall(info.corridor_axis, WallSlot::kA);
      const NodeId* wb = wall(info.corridor_axis, WallSlot::kB);
      drain_corridor(formed_it->second, *wa, *wb);
    }
    return true;
  }

  if (info.kind == SpaceKind::kCorridor) {
    const NodeId* wa = wall(info.corridor_axis, WallSlot::kA);
    const NodeId* wb = wall(info.corridor_axis, WallSlot::kB);
    if (!wa || !wb) {
      set_reason("not all corridor walls mapped");
      return false;
    }
    const auto& pending = ledger.pending_corridor_centers[space_id];
    if (pending.empty()) {
      set_reason("no marker center measurement yet");
      return false;
    }
    Eigen::Vector3d center;
    try {
      center = corridor_center(plane_of(*wa), plane_of(*wb), pending.back());
    } catch (const Error& e) {
      set_reason(e.what());
      return false;
    }
    Node n;
    n.value = CorridorNode{center, info.corridor_axis};
    const NodeId space_node = g.add_node(std::move(n));
    ledger.spaces.emplace(space_id, space_node);
    drain_corridor(space_node, *wa, *wb);

    for (int door_marker : ledger.pending_doorways[space_id])
      add_doorway_factor(door_marker, space_node, ledger, g, cfg, nullptr);
    ledger.pending_doorways.erase(space_id);
    return true;
  }

  // Room
  const NodeId* xa = wall(Axis::kX, WallSlot::kA);
  const NodeId* xb = wall(Axis::kX, WallSlot::kB);
  const NodeId* ya = wall(Axis::kY, WallSlot::kA);
  const NodeId* yb = wall(Axis::kY, WallSlot::kB);
  if (!xa || !xb || !ya || !yb) {
    set_reason("not all room walls mapped");
    return false;
  }
  Eigen::Vector3d center;
  try {
    center = room_center(plane_of(*xa), plane_of(*xb), plane_of(*ya), plane_of(*yb));
  } catch (const Error& e) {
    set_reason(e.what());
    return false;
  }
  Node n;
  n.value = RoomNode{center};
  const NodeId space_node = g.add_node(std::move(n));
  ledger.spaces.emplace(space_id, space_node);

  Factor f;
  f.kind = FactorKind::kRoom;
  f.nodes = {space_node, *xa, *xb, *ya, *yb};
  f.information = cfg.weights.space_info();
  g.add_factor(std::move(f));

  for (int door_marker : ledger.pending_doorways[space_id])
    add_doorway_factor(door_marker, space_node, ledger, g, cfg, nullptr);
  ledger.pending_doorways.erase(space_id);
  return true;
}

}  // namespace sgraph::semantics
