#include "sgraph/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace sgraph::io {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

using semantics::EntityKind;
using semantics::WallSlot;

const char* axis_token(Axis a) { return a == Axis::kX ? "x" : "y"; }
const char* slot_token(WallSlot s) { return s == WallSlot::kA ? "a" : "b"; }

Axis read_axis(const std::string& tok) {
  if (tok == "x") return Axis::kX;
  if (tok == "y") return Axis::kY;
  throw ParseError("bad axis token '" + tok + "'");
}

WallSlot read_slot(const std::string& tok) {
  if (tok == "a") return WallSlot::kA;
  if (tok == "b") return WallSlot::kB;
  throw ParseError("bad slot token '" + tok + "'");
}

void append_pose(std::string& out, const geom::Pose& p) {
  const auto& q = p.rotation;
  const auto& t = p.translation;
  out += fmt(t.x());
  out += ' ';
  out += fmt(t.y());
  out += ' ';
  out += fmt(t.z());
  out += ' ';
  out += fmt(q.x());
  out += ' ';
  out += fmt(q.y());
  out += ' ';
  out += fmt(q.z());
  out += ' ';
  out += fmt(q.w());
}

void append_vec3(std::string& out, const Eigen::Vector3d& v) {
  out += fmt(v.x());
  out += ' ';
  out += fmt(v.y());
  out += ' ';
  out += fmt(v.z());
}

geom::Pose read_pose(std::istringstream& ls) {
  double tx, ty, tz, qx, qy, qz, qw;
  if (!(ls >> tx >> ty >> tz >> qx >> qy >> qz >> qw)) throw ParseError("bad pose");
  Eigen::Quaterniond q(qw, qx, qy, qz);
  if (std::abs(q.squaredNorm() - 1.0) > 1e-12) q.normalize();
  geom::Pose p;
  p.rotation = q;  // bypass renormalization so stored bits survive a round trip
  p.translation = Eigen::Vector3d(tx, ty, tz);
  return p;
}

Eigen::Vector3d read_vec3(std::istringstream& ls) {
  double x, y, z;
  if (!(ls >> x >> y >> z)) throw ParseError("bad 3-vector");
  return {x, y, z};
}

void expect_header(std::istream& in, const std::string& header) {
  std::string line;
  if (!std::getline(in, line) || line != header)
    throw ParseError("expected header '" + header + "'");
}

std::string keyword(std::istringstream& ls, const char* expected) {
  std::string tok;
  if (!(ls >> tok) || tok != expected)
    throw ParseError(std::string("expected token '") + expected + "'");
  return tok;
}

}  // namespace

// ---------------------------------------------------------------------------
// dictionary
// ---------------------------------------------------------------------------

std::string write_dictionary(const semantics::SemanticDictionary& dict) {
  std::string out = "sgraph.dict 1\n";
  for (const auto& [id, e] : dict.entries) {
    out += "marker " + std::to_string(id);
    if (e.entity_kind == EntityKind::kWall) {
      out += " wall space " + std::to_string(e.space_id) + " axis " + axis_token(e.axis) +
             " slot " + slot_token(e.slot);
    } else {
      out += " doorway space " + std::to_string(e.space_id);
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// scene
// ---------------------------------------------------------------------------

std::string write_scene(const sim::SceneSpec& scene) {
  std::string out = "sgraph.scene 1\n";
  out += "name " + scene.name + "\n";
  for (const auto& s : scene.spaces) {
    out += "space " + std::to_string(s.space_id) + ' ';
    out += s.kind == semantics::SpaceKind::kRoom ? "room" : "corridor";
    for (double v : {s.xmin, s.xmax, s.ymin, s.ymax, s.zmin, s.zmax}) {
      out += ' ';
      out += fmt(v);
    }
    if (s.kind == semantics::SpaceKind::kCorridor)
      out += std::string(" axis ") + axis_token(s.corridor_axis);
    out += '\n';
  }
  for (const auto& m : scene.wall_markers) {
    out += "wallmarker " + std::to_string(m.marker_id) + " space " +
           std::to_string(m.wall.space_id) + " axis " + axis_token(m.wall.axis) + " slot " +
           slot_token(m.wall.slot) + " frac " + fmt(m.along_frac) + " height " + fmt(m.height) +
           " size " + fmt(m.size) + '\n';
  }
  for (const auto& d : scene.doors) {
    out += "door " + std::to_string(d.marker_id) + " parent " +
           std::to_string(d.parent_space_id) + " size " + fmt(d.size) + " pose ";
    append_pose(out, d.frame_pose);
    out += '\n';
  }
  for (const auto& w : scene.trajectory) {
    out += "waypoint " + fmt(w.t) + " pose ";
    append_pose(out, w.pose);
    out += '\n';
  }
  return out;
}

sim::SceneSpec read_scene(std::istream& in) {
  expect_header(in, "sgraph.scene 1");
  sim::SceneSpec scene;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "name") {
      if (!(ls >> scene.name)) throw ParseError("bad scene name");
    } else if (tag == "space") {
      sim::SpaceSpec s;
      std::string kind;
      if (!(ls >> s.space_id >> kind >> s.xmin >> s.xmax >> s.ymin >> s.ymax >> s.zmin >> s.zmax))
        throw ParseError("bad space line");
      if (kind == "room") {
        s.kind = semantics::SpaceKind::kRoom;
      } else if (kind == "corridor") {
        s.kind = semantics::SpaceKind::kCorridor;
        std::string axis_tok;
        keyword(ls, "axis");
        if (!(ls >> axis_tok)) throw ParseError("bad corridor axis");
        s.corridor_axis = read_axis(axis_tok);
      } else {
        throw ParseError("bad space kind '" + kind + "'");
      }
      scene.spaces.push_back(s);
    } else if (tag == "wallmarker") {
      sim::MarkerPlacement m;
      std::string axis_tok, slot_tok;
      if (!(ls >> m.marker_id)) throw ParseError("bad wallmarker line");
      keyword(ls, "space");
      ls >> m.wall.space_id;
      keyword(ls, "axis");
      ls >> axis_tok;
      m.wall.axis = read_axis(axis_tok);
      keyword(ls, "slot");
      ls >> slot_tok;
      m.wall.slot = read_slot(slot_tok);
      keyword(ls, "frac");
      ls >> m.along_frac;
      keyword(ls, "height");
      ls >> m.height;
      keyword(ls, "size");
      if (!(ls >> m.size)) throw ParseError("bad wallmarker line");
      scene.wall_markers.push_back(m);
    } else if (tag == "door") {
      sim::DoorSpec d;
      if (!(ls >> d.marker_id)) throw ParseError("bad door line");
      keyword(ls, "parent");
      ls >> d.parent_space_id;
      keyword(ls, "size");
      if (!(ls >> d.size)) throw ParseError("bad door line");
      keyword(ls, "pose");
      d.frame_pose = read_pose(ls);
      scene.doors.push_back(d);
    } else if (tag == "waypoint") {
      sim::Waypoint w;
      if (!(ls >> w.t)) throw ParseError("bad waypoint line");
      keyword(ls, "pose");
      w.pose = read_pose(ls);
      scene.trajectory.push_back(w);
    } else {
      throw ParseError("unknown scene line tag '" + tag + "'");
    }
  }
  return scene;
}

sim::SceneSpec read_scene_text(const std::string& text) {
  std::istringstream in(text);
  return read_scene(in);
}

sim::SceneSpec read_scene_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scene file " + path);
  return read_scene(in);
}

// ---------------------------------------------------------------------------
// dataset
// ---------------------------------------------------------------------------

std::string write_dataset(const sim::SimDataset& ds) {
  std::string out = "sgraph.dataset 1\n";
  out += "scene " + ds.scene_name + "\n";
  out += "dict_begin\n";
  out += write_dictionary(ds.dictionary);
  out += "dict_end\n";
  for (const auto& g : ds.ground_truth) {
    out += "gt " + fmt(g.t) + ' ';
    append_pose(out, g.pose);
    out += '\n';
  }
  for (const auto& o : ds.odometry) {
    out += "odom " + fmt(o.t_from) + ' ' + fmt(o.t_to) + ' ';
    append_pose(out, o.delta);
    out += '\n';
  }
  for (const auto& d : ds.detections) {
    out += "det " + fmt(d.t) + " marker " + std::to_string(d.obs.marker_id) + " size " +
           fmt(d.obs.size) + " pose ";
    append_pose(out, d.obs.local_pose);
    out += " points " + std::to_string(d.obs.nearby_points.size());
    for (const auto& p : d.obs.nearby_points) {
      out += ' ';
      append_vec3(out, p);
    }
    out += '\n';
  }
  return out;
}

sim::SimDataset read_dataset(std::istream& in) {
  expect_header(in, "sgraph.dataset 1");
  sim::SimDataset ds;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "scene") {
      ls >> ds.scene_name;
    } else if (tag == "dict_begin") {
      std::string dict_text;
      while (std::getline(in, line) && line != "dict_end") dict_text += line + '\n';
      if (line != "dict_end") throw ParseError("unterminated dictionary block");
      ds.dictionary = semantics::load_dictionary_text(dict_text);
    } else if (tag == "gt") {
      sim::TimedPose g;
      if (!(ls >> g.t)) throw ParseError("bad gt line");
      g.pose = read_pose(ls);
      ds.ground_truth.push_back(g);
    } else if (tag == "odom") {
      sim::OdometryStep o;
      if (!(ls >> o.t_from >> o.t_to)) throw ParseError("bad odom line");
      o.delta = read_pose(ls);
      ds.odometry.push_back(o);
    } else if (tag == "det") {
      sim::Detection d;
      if (!(ls >> d.t)) throw ParseError("bad det line");
      keyword(ls, "marker");
      ls >> d.obs.marker_id;
      keyword(ls, "size");
      ls >> d.obs.size;
      keyword(ls, "pose");
      d.obs.local_pose = read_pose(ls);
      keyword(ls, "points");
      std::size_t n = 0;
      if (!(ls >> n)) throw ParseError("bad det points count");
      d.obs.nearby_points.reserve(n);
      for (std::size_t i = 0; i < n; ++i) d.obs.nearby_points.push_back(read_vec3(ls));
      ds.detections.push_back(std::move(d));
    } else {
      throw ParseError("unknown dataset line tag '" + tag + "'");
    }
  }
  return ds;
}

sim::SimDataset read_dataset_text(const std::string& text) {
  std::istringstream in(text);
  return read_dataset(in);
}

sim::SimDataset read_dataset_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open dataset file " + path);
  return read_dataset(in);
}

// ---------------------------------------------------------------------------
// graph
// ---------------------------------------------------------------------------

namespace {

void append_info(std::string& out, const Eigen::MatrixXd& info) {
  out += " info";
  for (int i = 0; i < info.rows(); ++i)
    for (int j = i; j < info.cols(); ++j) {
      out += ' ';
      out += fmt(info(i, j));
    }
}

Eigen::MatrixXd read_info(std::istringstream& ls, int dim) {
  Eigen::MatrixXd info(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) {
      double v;
      if (!(ls >> v)) throw ParseError("bad information matrix");
      info(i, j) = v;
      info(j, i) = v;
    }
  return info;
}

FactorKind read_factor_kind(const std::string& tok) {
  if (tok == "odometry") return FactorKind::kOdometry;
  if (tok == "marker_obs") return FactorKind::kMarkerObs;
  if (tok == "wall_marker") return FactorKind::kWallMarker;
  if (tok == "corridor") return FactorKind::kCorridor;
  if (tok == "room") return FactorKind::kRoom;
  if (tok == "doorway_room") return FactorKind::kDoorwayRoom;
  throw ParseError("bad factor kind '" + tok + "'");
}

}  // namespace

std::string write_graph(const SituationalGraph& g) {
  std::string out = "sgraph.graph 1\n";
  for (const auto& [id, n] : g.nodes()) {
    out += "node " + std::to_string(id.value) + ' ';
    out += to_string(n.kind());
    out += n.fixed ? " fixed 1" : " fixed 0";
    switch (n.kind()) {
      case NodeKind::kKeyframe:
        out += " pose ";
        append_pose(out, std::get<KeyframeNode>(n.value).pose);
        break;
      case NodeKind::kMarker: {
        const auto& m = std::get<MarkerNode>(n.value);
        out += " id " + std::to_string(m.marker_id) + " size " + fmt(m.size) + " pose ";
        append_pose(out, m.pose);
        break;
      }
      case NodeKind::kWall: {
        const auto& w = std::get<WallNode>(n.value).plane;
        out += " plane " + fmt(w.azimuth) + ' ' + fmt(w.elevation) + ' ' + fmt(w.distance);
        break;
      }
      case NodeKind::kDoorway:
        out += " pose ";
        append_pose(out, std::get<DoorwayNode>(n.value).pose);
        break;
      case NodeKind::kRoom:
        out += " center ";
        append_vec3(out, std::get<RoomNode>(n.value).center);
        break;
      case NodeKind::kCorridor: {
        const auto& c = std::get<CorridorNode>(n.value);
        out += std::string(" axis ") + axis_token(c.axis) + " center ";
        append_vec3(out, c.center);
        break;
      }
    }
    out += '\n';
  }
  for (const auto& [id, f] : g.factors()) {
    out += "factor " + std::to_string(id.value) + ' ';
    out += to_string(f.kind);
    out += " nodes";
    for (const auto& nid : f.nodes) out += ' ' + std::to_string(nid.value);
    append_info(out, f.information);
    if (std::holds_alternative<geom::Pose>(f.measurement)) {
      out += " meas_pose ";
      append_pose(out, std::get<geom::Pose>(f.measurement));
    } else if (std::holds_alternative<Eigen::Vector3d>(f.measurement)) {
      out += " meas_vec ";
      append_vec3(out, std::get<Eigen::Vector3d>(f.measurement));
    }
    out += '\n';
  }
  return out;
}

SituationalGraph read_graph(std::istream& in) {
  expect_header(in, "sgraph.graph 1");
  SituationalGraph g;
  std::uint64_t max_node = 0, max_factor = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "node") {
      std::uint64_t id;
      std::string kind;
      int fixed = 0;
      if (!(ls >> id >> kind)) throw ParseError("bad node line");
      keyword(ls, "fixed");
      if (!(ls >> fixed)) throw ParseError("bad node fixed flag");
      Node n;
      n.fixed = fixed != 0;
      if (kind == "keyframe") {
        keyword(ls, "pose");
        n.value = KeyframeNode{read_pose(ls)};
      } else if (kind == "marker") {
        MarkerNode m;
        keyword(ls, "id");
        ls >> m.marker_id;
        keyword(ls, "size");
        if (!(ls >> m.size)) throw ParseError("bad marker node");
        keyword(ls, "pose");
        m.pose = read_pose(ls);
        n.value = m;
      } else if (kind == "wall") {
        keyword(ls, "plane");
        geom::SphericalPlane p;
        if (!(ls >> p.azimuth >> p.elevation >> p.distance)) throw ParseError("bad wall node");
        n.value = WallNode{p};
      } else if (kind == "doorway") {
        keyword(ls, "pose");
        n.value = DoorwayNode{read_pose(ls)};
      } else if (kind == "room") {
        keyword(ls, "center");
        n.value = RoomNode{read_vec3(ls)};
      } else if (kind == "corridor") {
        CorridorNode c;
        std::string axis_tok;
        keyword(ls, "axis");
        ls >> axis_tok;
        c.axis = read_axis(axis_tok);
        keyword(ls, "center");
        c.center = read_vec3(ls);
        n.value = c;
      } else {
        throw ParseError("bad node kind '" + kind + "'");
      }
      max_node = std::max(max_node, id);
      g.insert_with_ids(NodeId{id}, std::move(n), max_node + 1, max_factor + 1);
    } else if (tag == "factor") {
      std::uint64_t id;
      std::string kind;
      if (!(ls >> id >> kind)) throw ParseError("bad factor line");
      Factor f;
      f.kind = read_factor_kind(kind);
      keyword(ls, "nodes");
      for (std::size_t i = 0; i < factor_arity(f.kind); ++i) {
        std::uint64_t nid;
        if (!(ls >> nid)) throw ParseError("bad factor endpoints");
        f.nodes.push_back(NodeId{nid});
      }
      keyword(ls, "info");
      f.information = read_info(ls, residual_dim(f.kind));
      std::string meas_tag;
      if (ls >> meas_tag) {
        if (meas_tag == "meas_pose")
          f.measurement = read_pose(ls);
        else if (meas_tag == "meas_vec")
          f.measurement = read_vec3(ls);
        else
          throw ParseError("bad measurement tag '" + meas_tag + "'");
      }
      max_factor = std::max(max_factor, id);
      g.insert_with_ids(FactorId{id}, std::move(f));
    } else {
      throw ParseError("unknown graph line tag '" + tag + "'");
    }
  }
  return g;
}

SituationalGraph read_graph_text(const std::string& text) {
  std::istringstream in(text);
  return read_graph(in);
}

SituationalGraph read_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open graph file " + path);
  return read_graph(in);
}

std::string write_graph_dot(const SituationalGraph& g) {
  std::string out = "digraph sgraph {\n  rankdir=BT;\n";
  for (const auto& [id, n] : g.nodes()) {
    const char* color = "gray";
    switch (layer_of(n.kind())) {
      case Layer::kKeyframe:
        color = "lightblue";
        break;
      case Layer::kMarker:
        color = "khaki";
        break;
      case Layer::kStructural:
        color = "lightgreen";
        break;
      case Layer::kHighLevel:
        color = "salmon";
        break;
    }
    out += "  n" + std::to_string(id.value) + " [label=\"" + to_string(n.kind()) + " " +
           std::to_string(id.value) + "\", style=filled, fillcolor=" + color + "];\n";
  }
  for (const auto& [id, f] : g.factors()) {
    for (std::size_t i = 1; i < f.nodes.size(); ++i)
      out += "  n" + std::to_string(f.nodes[0].value) + " -> n" +
             std::to_string(f.nodes[i].value) + " [label=\"" + to_string(f.kind) + "\"];\n";
  }
  out += "}\n";
  return out;
}

// ---------------------------------------------------------------------------
// trajectory
// ---------------------------------------------------------------------------

std::string write_trajectory(const std::vector<eval::TimedPose>& traj) {
  std::string out = "# sgraph.trajectory 1\n# t tx ty tz qx qy qz qw\n";
  for (const auto& p : traj) {
    out += fmt(p.t) + ' ';
    append_pose(out, p.pose);
    out += '\n';
  }
  return out;
}

std::vector<eval::TimedPose> read_trajectory(std::istream& in) {
  std::vector<eval::TimedPose> traj;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    eval::TimedPose p;
    if (!(ls >> p.t)) throw ParseError("bad trajectory line");
    p.pose = read_pose(ls);
    traj.push_back(p);
  }
  return traj;
}

std::vector<eval::TimedPose> read_trajectory_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open trajectory file " + path);
  return read_trajectory(in);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file " + path);
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace sgraph::io
