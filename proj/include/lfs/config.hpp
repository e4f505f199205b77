#pragma once

// Layered run configuration: built-in defaults < config file < environment
// (LFSGEN_<SECTION>_<KEY>) < command-line flags.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "lfs/evaluator.hpp"
#include "lfs/io.hpp"

namespace lfs {

constexpr std::string_view kToolVersion = "0.3.0";
constexpr std::string_view kEnvPrefix = "LFSGEN_";

/// Camera as configured: intrinsics derive from the field of view unless
/// fx, fy, cx or cy are given explicitly.
struct CameraSetup {
  int width = 640;
  int height = 480;
  double hfov_deg = 86.0;
  double max_range = 15.0;
  std::optional<double> fx, fy, cx, cy;

  CameraIntrinsics intrinsics() const;
};

struct AppConfig {
  std::uint64_t seed = 1;
  CameraSetup camera;  // resolved into sim.intrinsics
  GeneratorConfig generator;
  SimConfig sim;
  FilterPolicy policy;
  CampaignOptions campaign;
};

/// Every key with its default value; the layering and env names derive from it.
Json default_config_json();

/// Strict conversion: unknown keys and wrong types raise InvalidConfig naming the JSON pointer.
AppConfig config_from_json(const Json& j);
Json config_to_json(const AppConfig& cfg);

/// Overlays `patch` onto `base`, rejecting keys absent from `base`.
void merge_config(Json& base, const Json& patch, const std::string& pointer = "");

/// Applies LFSGEN_<SECTION>_<KEY> variables (e.g. LFSGEN_PLANNER_TREE_DEPTH,
/// LFSGEN_SEED). Values are parsed as JSON, falling back to a plain string.
/// `getenv` is injectable for tests.
using EnvLookup = std::optional<std::string> (*)(const std::string& name);
void apply_env_overrides(Json& cfg, EnvLookup getenv);
std::optional<std::string> process_env(const std::string& name);

/// Reads a config file, or the config snapshot inside a run manifest.
Json load_config_layer(const std::filesystem::path& path);

}  // namespace lfs
