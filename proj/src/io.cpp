#include "lfs/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "lfs/error.hpp"

namespace lfs {

namespace schemas {
extern const std::string_view kTestCase;
extern const std::string_view kMission;
extern const std::string_view kReport;
extern const std::string_view kCampaign;
extern const std::string_view kTiming;
extern const std::string_view kManifest;
}  // namespace schemas

namespace {

std::string fmt(double v, int precision = 6) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

std::string escape_pointer_token(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

bool type_matches(const Json& node, const std::string& type) {
  if (type == "object") return node.is_object();
  if (type == "array") return node.is_array();
  if (type == "number") return node.is_number();
  if (type == "integer") return node.is_number_integer();
  if (type == "boolean") return node.is_boolean();
  if (type == "string") return node.is_string();
  if (type == "null") return node.is_null();
  return false;
}

class SchemaValidator {
 public:
  explicit SchemaValidator(const Json& root) : root_(root) {}

  void check(const Json& node, const Json& schema, const std::string& ptr) {
    if (auto ref = schema.find("$ref"); ref != schema.end()) {
      const std::string target = ref->get<std::string>();
      check(node, root_.at(Json::json_pointer(target.substr(1))), ptr);
      return;
    }
    if (auto type = schema.find("type"); type != schema.end()) {
      bool ok = false;
      std::string expected;
      if (type->is_string()) {
        expected = type->get<std::string>();
        ok = type_matches(node, expected);
      } else {
        for (const auto& t : *type) {
          expected += (expected.empty() ? "" : " or ") + t.get<std::string>();
          ok = ok || type_matches(node, t.get<std::string>());
        }
      }
      if (!ok) {
        issue(ptr, "expected " + expected);
        return;
      }
    }
    if (auto e = schema.find("enum"); e != schema.end()) {
      if (std::find(e->begin(), e->end(), node) == e->end())
        issue(ptr, "value " + node.dump() + " is not one of " + e->dump());
    }
    if (node.is_number()) {
      const double v = node.get<double>();
      if (auto m = schema.find("minimum"); m != schema.end() && v < m->get<double>())
        issue(ptr, "must be >= " + m->dump());
      if (auto m = schema.find("exclusiveMinimum"); m != schema.end() && v <= m->get<double>())
        issue(ptr, "must be > " + m->dump());
    }
    if (node.is_object()) check_object(node, schema, ptr);
    if (node.is_array()) check_array(node, schema, ptr);
  }

  std::vector<SchemaIssue> issues;

 private:
  void issue(const std::string& ptr, std::string msg) {
    issues.push_back({ptr.empty() ? "/" : ptr, std::move(msg)});
  }

  void check_object(const Json& node, const Json& schema, const std::string& ptr) {
    if (auto req = schema.find("required"); req != schema.end()) {
      for (const auto& key : *req) {
        const std::string k = key.get<std::string>();
        if (!node.contains(k)) issue(ptr + "/" + escape_pointer_token(k), "required property is missing");
      }
    }
    const auto props = schema.find("properties");
    const auto additional = schema.find("additionalProperties");
    for (const auto& [key, value] : node.items()) {
      const std::string child = ptr + "/" + escape_pointer_token(key);
      if (props != schema.end() && props->contains(key)) {
        check(value, props->at(key), child);
      } else if (additional != schema.end() && additional->is_boolean() && !additional->get<bool>()) {
        issue(child, "unexpected property");
      }
    }
  }

  void check_array(const Json& node, const Json& schema, const std::string& ptr) {
    const auto n = node.size();
    if (auto m = schema.find("minItems"); m != schema.end() && n < m->get<std::size_t>())
      issue(ptr, "needs at least " + m->dump() + " items");
    if (auto m = schema.find("maxItems"); m != schema.end() && n > m->get<std::size_t>())
      issue(ptr, "allows at most " + m->dump() + " items");
    if (auto items = schema.find("items"); items != schema.end())
      for (std::size_t i = 0; i < n; ++i) check(node[i], *items, ptr + "/" + std::to_string(i));
  }

  const Json& root_;
};

const Json& parsed_schema(SchemaId id) {
  static const Json test_case = Json::parse(schemas::kTestCase);
  static const Json mission = Json::parse(schemas::kMission);
  static const Json report = Json::parse(schemas::kReport);
  static const Json campaign = Json::parse(schemas::kCampaign);
  static const Json timing = Json::parse(schemas::kTiming);
  static const Json manifest = Json::parse(schemas::kManifest);
  switch (id) {
    case SchemaId::TestCase: return test_case;
    case SchemaId::Mission: return mission;
    case SchemaId::Report: return report;
    case SchemaId::Campaign: return campaign;
    case SchemaId::Timing: return timing;
    case SchemaId::Manifest: return manifest;
  }
  return test_case;
}

Vec3 point_from_json(const Json& j) {
  return {j.at("x").get<double>(), j.at("y").get<double>(), j.at("z").get<double>()};
}

Json obstacle_to_json(const CuboidObstacle& o) {
  Json j;
  j["x"] = o.center_x;
  j["y"] = o.center_y;
  j["l"] = o.length;
  j["w"] = o.width;
  j["h"] = o.height;
  j["r"] = rad_to_deg(o.rotation);
  return j;
}

Json nullable(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

std::string_view schema_text(SchemaId id) {
  switch (id) {
    case SchemaId::TestCase: return schemas::kTestCase;
    case SchemaId::Mission: return schemas::kMission;
    case SchemaId::Report: return schemas::kReport;
    case SchemaId::Campaign: return schemas::kCampaign;
    case SchemaId::Timing: return schemas::kTiming;
    case SchemaId::Manifest: return schemas::kManifest;
  }
  return {};
}

std::vector<SchemaIssue> validate_schema(const Json& doc, SchemaId id) {
  const Json& schema = parsed_schema(id);
  SchemaValidator v(schema);
  v.check(doc, schema, "");
  return v.issues;
}

void require_schema(const Json& doc, SchemaId id, std::string_view what) {
  const auto issues = validate_schema(doc, id);
  if (issues.empty()) return;
  std::string msg = std::string(what) + " does not match its schema:";
  for (const auto& i : issues) msg += "\n  " + i.pointer + ": " + i.message;
  throw Error(ErrorCode::Schema, msg);
}

Json to_json(const Vec3& p) {
  Json j;
  j["x"] = p.x;
  j["y"] = p.y;
  j["z"] = p.z;
  return j;
}

Json mission_to_json(const Mission& m) {
  Json j;
  j["start"] = to_json(m.start);
  j["waypoints"] = Json::array();
  for (const auto& w : m.waypoints) j["waypoints"].push_back(to_json(w));
  j["landing"] = to_json(m.landing);
  return j;
}

Json test_case_to_json(const TestCase& tc) {
  Json j;
  j["mission"] = mission_to_json(tc.mission);
  j["obstacles"] = Json::array({obstacle_to_json(tc.obstacles[0]), obstacle_to_json(tc.obstacles[1])});
  j["soi"] = {{"start", to_json(tc.soi.start)}, {"end", to_json(tc.soi.end)}};
  j["seed"] = tc.seed;
  j["index"] = tc.index;
  j["canonical_transform"] = {{"reflect_x", tc.canonical_transform.reflect_x},
                              {"reflect_y", tc.canonical_transform.reflect_y},
                              {"center_x", tc.canonical_transform.center_x},
                              {"center_y", tc.canonical_transform.center_y}};
  return j;
}

Mission mission_from_json(const Json& j) {
  require_schema(j, SchemaId::Mission, "mission");
  Mission m;
  m.start = point_from_json(j.at("start"));
  for (const auto& w : j.at("waypoints")) m.waypoints.push_back(point_from_json(w));
  m.landing = point_from_json(j.at("landing"));
  return m;
}

TestCase test_case_from_json(const Json& j) {
  require_schema(j, SchemaId::TestCase, "test case");
  TestCase tc;
  const Json& m = j.at("mission");
  tc.mission.start = point_from_json(m.at("start"));
  for (const auto& w : m.at("waypoints")) tc.mission.waypoints.push_back(point_from_json(w));
  tc.mission.landing = point_from_json(m.at("landing"));
  for (std::size_t i = 0; i < 2; ++i) {
    const Json& o = j.at("obstacles")[i];
    CuboidObstacle& obs = tc.obstacles[i];
    obs = {o.at("x").get<double>(), o.at("y").get<double>(), o.at("l").get<double>(),
           o.at("w").get<double>(), o.at("h").get<double>(), deg_to_rad(o.at("r").get<double>())};
    if (obs.length < obs.width)
      throw Error(ErrorCode::Schema, "test case does not match its schema:\n  /obstacles/" +
                                         std::to_string(i) + "/l: must be >= w");
  }
  tc.soi = {point_from_json(j.at("soi").at("start")), point_from_json(j.at("soi").at("end"))};
  if (!tc.soi.valid())
    throw Error(ErrorCode::Schema, "test case does not match its schema:\n  /soi: start equals end");
  tc.seed = j.at("seed").get<std::uint64_t>();
  tc.index = j.at("index").get<std::uint64_t>();
  if (auto t = j.find("canonical_transform"); t != j.end()) {
    tc.canonical_transform.reflect_x = t->at("reflect_x").get<bool>();
    tc.canonical_transform.reflect_y = t->at("reflect_y").get<bool>();
    tc.canonical_transform.center_x = t->value("center_x", 0.0);
    tc.canonical_transform.center_y = t->value("center_y", 0.0);
  }
  return tc;
}

Json report_to_json(const EvaluationReport& r, const FilterPolicy& policy,
                    std::string_view trajectory_file) {
  Json j;
  j["seed"] = r.test_case.seed;
  j["index"] = r.test_case.index;
  j["outcome"] = std::string(to_string(r.outcome));
  j["verdict"] = std::string(to_string(r.verdict));
  j["min_distance"] = nullable(r.min_distance);
  j["time_of_min"] = r.time_of_min;
  j["steps"] = r.steps;
  j["violation_threshold"] = policy.violation_threshold;
  j["lower_cutoff"] = policy.lower_cutoff;
  j["trajectory"] = std::string(trajectory_file);
  return j;
}

Json campaign_to_json(const CampaignResult& result, const CampaignOptions& options, std::uint64_t seed,
                      const std::vector<SuiteEntry>& files) {
  Json j;
  j["seed"] = seed;
  j["budget"] = options.budget;
  j["target"] = options.target;
  j["evaluated"] = result.stats.evaluated;
  j["counts"] = {{"PREDICTED_VIOLATION", result.stats.predicted_violations},
                 {"SAFE", result.stats.safe},
                 {"INVALID", result.stats.invalid}};
  j["total_steps"] = result.stats.total_steps;
  j["suite"] = Json::array();
  for (std::size_t i = 0; i < files.size(); ++i) {
    const EvaluationReport& r = *files[i].report;
    j["suite"].push_back({{"rank", i + 1},
                          {"index", r.test_case.index},
                          {"min_distance", r.min_distance},
                          {"time_of_min", r.time_of_min},
                          {"outcome", std::string(to_string(r.outcome))},
                          {"file", files[i].file}});
  }
  return j;
}

Json timing_to_json(const CampaignStats& stats, int workers) {
  Json j;
  j["simulations"] = stats.evaluated;
  j["steps"] = stats.total_steps;
  j["total_wall_clock_ms"] = stats.total_wall_clock_ms;
  j["mean_ms_per_simulation"] = stats.mean_ms_per_simulation();
  j["mean_ms_per_step"] = stats.mean_ms_per_step();
  j["workers"] = std::max(workers, 1);
  return j;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "t,x,y,z,yaw,min_dist\n";
  for (const auto& s : traj.samples) {
    out += fmt(s.time, 3) + ',' + fmt(s.pose.position.x) + ',' + fmt(s.pose.position.y) + ',' +
           fmt(s.pose.position.z) + ',' + fmt(s.pose.yaw) + ',' + fmt(s.min_obstacle_distance) + '\n';
  }
  return out;
}

std::string campaign_cases_csv(const std::vector<EvaluationReport>& evaluated) {
  std::string out = "index,outcome,verdict,min_dist,time_of_min,steps\n";
  for (const auto& r : evaluated) {
    out += std::to_string(r.test_case.index) + ',' + std::string(to_string(r.outcome)) + ',' +
           std::string(to_string(r.verdict)) + ',' + fmt(r.min_distance) + ',' + fmt(r.time_of_min, 3) +
           ',' + std::to_string(r.steps) + '\n';
  }
  return out;
}

std::string trajectory_svg(const PlotScene& scene, const Trajectory* traj) {
  constexpr double kScale = 10.0;   // px per metre
  constexpr double kMargin = 3.0;   // metres around the content
  double min_x = scene.arena.x_min, max_x = scene.arena.x_max;
  double min_y = scene.arena.y_min, max_y = scene.arena.y_max;
  auto grow = [&](const Vec2& p) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  };
  if (traj)
    for (const auto& s : traj->samples) grow(s.pose.position.xy());
  for (const auto& o : scene.obstacles)
    for (const auto& v : base_vertices(o)) grow(v);
  min_x -= kMargin;
  max_x += kMargin;
  min_y -= kMargin;
  max_y += kMargin;

  auto px = [&](double x) { return fmt((x - min_x) * kScale, 2); };
  auto py = [&](double y) { return fmt((max_y - y) * kScale, 2); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt((max_x - min_x) * kScale, 0)
     << "\" height=\"" << fmt((max_y - min_y) * kScale, 0) << "\">\n";
  os << "  <rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const ArenaRect& a = scene.arena;
  os << "  <rect class=\"arena\" x=\"" << px(a.x_min) << "\" y=\"" << py(a.y_max) << "\" width=\""
     << fmt((a.x_max - a.x_min) * kScale, 2) << "\" height=\"" << fmt((a.y_max - a.y_min) * kScale, 2)
     << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
  if (scene.soi) {
    os << "  <line class=\"soi\" x1=\"" << px(scene.soi->start.x) << "\" y1=\"" << py(scene.soi->start.y)
       << "\" x2=\"" << px(scene.soi->end.x) << "\" y2=\"" << py(scene.soi->end.y)
       << "\" stroke=\"gray\" stroke-width=\"1.5\" stroke-dasharray=\"8,6\"/>\n";
  }
  for (const auto& o : scene.obstacles) {
    os << "  <polygon class=\"obstacle\" points=\"";
    const auto verts = base_vertices(o);
    for (std::size_t i = 0; i < verts.size(); ++i)
      os << (i ? " " : "") << px(verts[i].x) << ',' << py(verts[i].y);
    os << "\" fill=\"#8c8c8c\" stroke=\"#404040\"/>\n";
  }
  if (traj && !traj->samples.empty()) {
    os << "  <polyline class=\"path\" fill=\"none\" stroke=\"#1f5fbf\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < traj->samples.size(); ++i) {
      const Vec3& p = traj->samples[i].pose.position;
      os << (i ? " " : "") << px(p.x) << ',' << py(p.y);
    }
    os << "\"/>\n";
    const auto it = std::min_element(traj->samples.begin(), traj->samples.end(),
                                     [](const TrajectorySample& l, const TrajectorySample& r) {
                                       return l.min_obstacle_distance < r.min_obstacle_distance;
                                     });
    if (std::isfinite(it->min_obstacle_distance)) {
      const Vec3& p = it->pose.position;
      os << "  <circle class=\"min-distance\" cx=\"" << px(p.x) << "\" cy=\"" << py(p.y)
         << "\" r=\"5\" fill=\"none\" stroke=\"red\" stroke-width=\"2\"/>\n";
      os << "  <text x=\"" << px(p.x + 0.8) << "\" y=\"" << py(p.y + 0.8)
         << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"red\">min " << fmt(it->min_obstacle_distance, 2)
         << " m</text>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

std::string depth_pgm(const DepthImage& img) {
  const auto& intr = img.intrinsics;
  std::string out = "P5\n" + std::to_string(intr.width) + ' ' + std::to_string(intr.height) + "\n65535\n";
  out.reserve(out.size() + img.data.size() * 2);
  for (double d : img.data) {
    const double mm = std::clamp(std::round(d * 1000.0), 0.0, 65535.0);
    const auto v = static_cast<std::uint16_t>(mm);
    out.push_back(static_cast<char>(v >> 8));
    out.push_back(static_cast<char>(v & 0xff));
  }
  return out;
}

std::string cloud_xyz(const PointCloud& cloud) {
  std::string out;
  for (const auto& p : cloud.points) out += fmt(p.x) + ' ' + fmt(p.y) + ' ' + fmt(p.z) + '\n';
  return out;
}

std::string tree_jsonl(const LookaheadTree& tree, std::optional<std::size_t> chosen) {
  std::string out;
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const auto& n = tree.nodes[i];
    Json j;
    j["index"] = i;
    j["x"] = n.position.x;
    j["y"] = n.position.y;
    j["z"] = n.position.z;
    j["yaw"] = n.yaw;
    j["depth"] = n.depth;
    j["cost"] = n.accumulated_cost;
    j["parent"] = n.parent ? Json(*n.parent) : Json(nullptr);
    j["chosen"] = chosen && *chosen == i;
    out += j.dump() + '\n';
  }
  return out;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::Schema, path.string() + " is not valid JSON:\n  /: " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

std::string dump_json(const Json& j) { return j.dump(2) + '\n'; }

}  // namespace lfs
