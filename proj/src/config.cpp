#include "lfs/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>

#include "lfs/error.hpp"

namespace lfs {

namespace {

[[noreturn]] void bad(const std::string& pointer, const std::string& why) {
  throw Error(ErrorCode::InvalidConfig, "config " + pointer + ": " + why);
}

Json maybe(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

// Typed access into one section of a fully merged config.
class Section {
 public:
  Section(const Json& root, std::string name) : j_(root.at(name)), name_(std::move(name)) {}

  double num(const char* key) const {
    const Json& v = j_.at(key);
    if (!v.is_number()) bad(ptr(key), "expected a number");
    return v.get<double>();
  }
  std::optional<double> opt_num(const char* key) const {
    const Json& v = j_.at(key);
    if (v.is_null()) return std::nullopt;
    return num(key);
  }
  int integer(const char* key) const {
    const Json& v = j_.at(key);
    if (!v.is_number_integer()) bad(ptr(key), "expected an integer");
    return v.get<int>();
  }
  std::size_t count(const char* key) const {
    const Json& v = j_.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) bad(ptr(key), "expected a non-negative integer");
    return v.get<std::size_t>();
  }
  bool flag(const char* key) const {
    const Json& v = j_.at(key);
    if (!v.is_boolean()) bad(ptr(key), "expected true or false");
    return v.get<bool>();
  }
  std::string str(const char* key) const {
    const Json& v = j_.at(key);
    if (!v.is_string()) bad(ptr(key), "expected a string");
    return v.get<std::string>();
  }
  std::string ptr(const char* key) const { return "/" + name_ + "/" + key; }

 private:
  const Json& j_;
  std::string name_;
};

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
  return s;
}

}  // namespace

CameraIntrinsics CameraSetup::intrinsics() const {
  CameraIntrinsics intr = CameraIntrinsics::from_hfov(width, height, deg_to_rad(hfov_deg), max_range);
  if (fx) intr.fx = *fx;
  if (fy) intr.fy = *fy;
  if (cx) intr.cx = *cx;
  if (cy) intr.cy = *cy;
  return intr;
}

Json config_to_json(const AppConfig& cfg) {
  const GeneratorConfig& g = cfg.generator;
  const SimConfig& s = cfg.sim;
  const PlannerParams& p = s.planner;
  Json j;
  j["seed"] = cfg.seed;
  j["arena"] = {{"x_min", g.arena.x_min}, {"x_max", g.arena.x_max},
                {"y_min", g.arena.y_min}, {"y_max", g.arena.y_max}};
  j["generator"] = {
      {"diagonal_min", g.diagonal_min},
      {"diagonal_max", g.diagonal_max},
      {"obstacle_width", g.obstacle_width},
      {"obstacle_height", g.obstacle_height},
      {"rotation_min_deg", rad_to_deg(g.rotation_min)},
      {"rotation_max_deg", rad_to_deg(g.rotation_max)},
      {"gap_min", g.gap_min},
      {"gap_max", g.gap_max},
      {"length_ratio", g.length_ratio},
      {"max_draws", g.max_draws},
      {"placement_attempts", g.placement_attempts},
      {"max_candidates", g.max_candidates},
      {"split_y_min", g.split_y_range ? Json(g.split_y_range->first) : Json(nullptr)},
      {"split_y_max", g.split_y_range ? Json(g.split_y_range->second) : Json(nullptr)},
  };
  j["kinematics"] = {
      {"v_max", s.kinematics.v_max},
      {"yaw_rate_max_deg", rad_to_deg(s.kinematics.yaw_rate_max)},
      {"dt", s.kinematics.dt},
      {"yaw_gate_fraction", s.kinematics.yaw_gate_fraction},
      {"fraction_rule", s.kinematics.fraction_rule == FractionRule::Inverse ? "inverse" : "direct"},
  };
  const CameraSetup& c = cfg.camera;
  j["camera"] = {
      {"width", c.width},
      {"height", c.height},
      {"hfov_deg", c.hfov_deg},
      {"max_range", c.max_range},
      {"fx", maybe(c.fx)},
      {"fy", maybe(c.fy)},
      {"cx", maybe(c.cx)},
      {"cy", maybe(c.cy)},
      {"mount_x", s.extrinsics.mount_translation.x},
      {"mount_y", s.extrinsics.mount_translation.y},
      {"mount_z", s.extrinsics.mount_translation.z},
      {"mount_pitch_deg", rad_to_deg(s.extrinsics.mount_pitch)},
      {"stride", s.cloud_stride},
  };
  j["planner"] = {
      {"bin_resolution_deg", p.bin_resolution_deg},
      {"tree_depth", p.tree_depth},
      {"children_per_node", p.children_per_node},
      {"node_step", p.node_step_m},
      {"goal_weight", p.goal_weight},
      {"heading_weight", p.heading_weight},
      {"smoothness_weight", p.smoothness_weight},
      {"obstacle_inflation", p.obstacle_inflation_m},
      {"occupancy_threshold", p.occupancy_threshold},
      {"histogram_radius", p.histogram_radius_m},
      {"elevation_cap_deg", p.elevation_cap_deg},
      {"min_point_height", p.min_point_height_m},
      {"max_expansions", p.max_expansions},
      {"voxel_size", p.voxel_size_m},
  };
  j["sim"] = {
      {"goal_tolerance", s.goal_tolerance_m},
      {"max_steps", s.max_steps},
      {"cruise_altitude", s.cruise_altitude_m},
      {"max_consecutive_failures", s.max_consecutive_failures},
      {"approach_margin", s.approach_margin_m},
      {"distance_mode", s.distance_mode == DistanceMode::Solid3d ? "3d" : "2d"},
      {"obstacle_memory", s.obstacle_memory},
  };
  j["policy"] = {
      {"violation_threshold", cfg.policy.violation_threshold},
      {"lower_cutoff", cfg.policy.lower_cutoff},
      {"require_goal_reached", cfg.policy.require_goal_reached},
  };
  j["campaign"] = {
      {"budget", cfg.campaign.budget},
      {"target", cfg.campaign.target},
      {"workers", cfg.campaign.workers},
  };
  return j;
}

Json default_config_json() { return config_to_json(AppConfig{}); }

void merge_config(Json& base, const Json& patch, const std::string& pointer) {
  if (!patch.is_object()) bad(pointer.empty() ? "/" : pointer, "expected an object");
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    const std::string here = pointer + "/" + it.key();
    if (!base.contains(it.key())) bad(here, "unknown key");
    Json& slot = base[it.key()];
    if (slot.is_object()) {
      merge_config(slot, it.value(), here);
    } else {
      if (it.value().is_object() || it.value().is_array()) bad(here, "expected a scalar");
      slot = it.value();
    }
  }
}

AppConfig config_from_json(const Json& j) {
  Json full = default_config_json();
  merge_config(full, j);

  AppConfig cfg;
  const Json& seed = full.at("seed");
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0))
    bad("/seed", "expected a non-negative integer");
  cfg.seed = seed.get<std::uint64_t>();

  const Section arena(full, "arena");
  GeneratorConfig& g = cfg.generator;
  g.arena = {arena.num("x_min"), arena.num("x_max"), arena.num("y_min"), arena.num("y_max")};
  g.rng_seed = cfg.seed;

  const Section gen(full, "generator");
  g.diagonal_min = gen.num("diagonal_min");
  g.diagonal_max = gen.num("diagonal_max");
  g.obstacle_width = gen.num("obstacle_width");
  g.obstacle_height = gen.num("obstacle_height");
  g.rotation_min = deg_to_rad(gen.num("rotation_min_deg"));
  g.rotation_max = deg_to_rad(gen.num("rotation_max_deg"));
  g.gap_min = gen.num("gap_min");
  g.gap_max = gen.num("gap_max");
  g.length_ratio = gen.num("length_ratio");
  g.max_draws = gen.integer("max_draws");
  g.placement_attempts = gen.integer("placement_attempts");
  g.max_candidates = gen.integer("max_candidates");
  const auto ylo = gen.opt_num("split_y_min");
  const auto yhi = gen.opt_num("split_y_max");
  if (ylo.has_value() != yhi.has_value())
    bad("/generator/split_y_min", "split_y_min and split_y_max must be set together");
  if (ylo) g.split_y_range = std::make_pair(*ylo, *yhi);

  SimConfig& s = cfg.sim;
  const Section kin(full, "kinematics");
  s.kinematics.v_max = kin.num("v_max");
  s.kinematics.yaw_rate_max = deg_to_rad(kin.num("yaw_rate_max_deg"));
  s.kinematics.dt = kin.num("dt");
  s.kinematics.yaw_gate_fraction = kin.num("yaw_gate_fraction");
  const std::string rule = kin.str("fraction_rule");
  if (rule == "inverse") s.kinematics.fraction_rule = FractionRule::Inverse;
  else if (rule == "direct") s.kinematics.fraction_rule = FractionRule::Direct;
  else bad(kin.ptr("fraction_rule"), "expected \"inverse\" or \"direct\"");

  const Section cam(full, "camera");
  CameraSetup& c = cfg.camera;
  c.width = cam.integer("width");
  c.height = cam.integer("height");
  c.hfov_deg = cam.num("hfov_deg");
  c.max_range = cam.num("max_range");
  c.fx = cam.opt_num("fx");
  c.fy = cam.opt_num("fy");
  c.cx = cam.opt_num("cx");
  c.cy = cam.opt_num("cy");
  if (!(c.hfov_deg > 0.0 && c.hfov_deg < 180.0)) bad(cam.ptr("hfov_deg"), "must lie in (0, 180)");
  s.intrinsics = c.intrinsics();
  s.extrinsics.mount_translation = {cam.num("mount_x"), cam.num("mount_y"), cam.num("mount_z")};
  s.extrinsics.mount_pitch = deg_to_rad(cam.num("mount_pitch_deg"));
  s.cloud_stride = cam.integer("stride");

  const Section pl(full, "planner");
  PlannerParams& p = s.planner;
  p.bin_resolution_deg = pl.num("bin_resolution_deg");
  p.tree_depth = pl.integer("tree_depth");
  p.children_per_node = pl.integer("children_per_node");
  p.node_step_m = pl.num("node_step");
  p.goal_weight = pl.num("goal_weight");
  p.heading_weight = pl.num("heading_weight");
  p.smoothness_weight = pl.num("smoothness_weight");
  p.obstacle_inflation_m = pl.num("obstacle_inflation");
  p.occupancy_threshold = pl.num("occupancy_threshold");
  p.histogram_radius_m = pl.num("histogram_radius");
  p.elevation_cap_deg = pl.num("elevation_cap_deg");
  p.min_point_height_m = pl.num("min_point_height");
  p.max_expansions = pl.integer("max_expansions");
  p.voxel_size_m = pl.num("voxel_size");

  const Section sim(full, "sim");
  s.goal_tolerance_m = sim.num("goal_tolerance");
  s.max_steps = sim.integer("max_steps");
  s.cruise_altitude_m = sim.num("cruise_altitude");
  s.max_consecutive_failures = sim.integer("max_consecutive_failures");
  s.approach_margin_m = sim.num("approach_margin");
  const std::string mode = sim.str("distance_mode");
  if (mode == "3d") s.distance_mode = DistanceMode::Solid3d;
  else if (mode == "2d") s.distance_mode = DistanceMode::Planar2d;
  else bad(sim.ptr("distance_mode"), "expected \"3d\" or \"2d\"");
  s.obstacle_memory = sim.flag("obstacle_memory");

  const Section pol(full, "policy");
  cfg.policy.violation_threshold = pol.num("violation_threshold");
  cfg.policy.lower_cutoff = pol.num("lower_cutoff");
  cfg.policy.require_goal_reached = pol.flag("require_goal_reached");

  const Section camp(full, "campaign");
  cfg.campaign.budget = camp.count("budget");
  cfg.campaign.target = camp.count("target");
  cfg.campaign.workers = camp.integer("workers");

  g.validate();
  s.validate();
  cfg.policy.validate();
  return cfg;
}

void apply_env_overrides(Json& cfg, EnvLookup getenv) {
  auto parse = [](const std::string& raw) {
    Json v = Json::parse(raw, nullptr, false);
    return v.is_discarded() ? Json(raw) : v;
  };
  for (auto it = cfg.begin(); it != cfg.end(); ++it) {
    const std::string section = upper(it.key());
    if (!it.value().is_object()) {
      if (auto raw = getenv(std::string(kEnvPrefix) + section)) it.value() = parse(*raw);
      continue;
    }
    for (auto kv = it.value().begin(); kv != it.value().end(); ++kv) {
      const std::string name = std::string(kEnvPrefix) + section + "_" + upper(kv.key());
      if (auto raw = getenv(name)) kv.value() = parse(*raw);
    }
  }
}

std::optional<std::string> process_env(const std::string& name) {
  if (const char* v = std::getenv(name.c_str())) return std::string(v);
  return std::nullopt;
}

Json load_config_layer(const std::filesystem::path& path) {
  Json j = read_json_file(path);
  // A run manifest replays its resolved snapshot.
  if (j.is_object() && j.contains("tool") && j.contains("config")) return j.at("config");
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, path.string() + ": config must be a JSON object");
  return j;
}

}  // namespace lfs
