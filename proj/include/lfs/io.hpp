#pragma once

// File formats: test-case and mission JSON, evaluation reports, campaign
// summaries, trajectory CSV, SVG plots and sensor debug dumps.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "lfs/evaluator.hpp"
#include "lfs/planner.hpp"
#include "lfs/render.hpp"
#include "lfs/testgen.hpp"

namespace lfs {

using Json = nlohmann::ordered_json;

enum class SchemaId { TestCase, Mission, Report, Campaign, Timing, Manifest };

/// Source text of a shipped schema.
std::string_view schema_text(SchemaId id);

struct SchemaIssue {
  std::string pointer;  // JSON pointer into the validated document
  std::string message;
};

/// Validates against the shipped schema (the subset of JSON Schema those
/// files use: type, enum, required, properties, additionalProperties, items,
/// minItems, maxItems, minimum, exclusiveMinimum, $ref).
std::vector<SchemaIssue> validate_schema(const Json& doc, SchemaId id);

/// Throws Error(Schema) listing every issue as "<pointer>: <message>".
void require_schema(const Json& doc, SchemaId id, std::string_view what);

Json to_json(const Vec3& p);
Json mission_to_json(const Mission& m);
Json test_case_to_json(const TestCase& tc);

/// Schema-checked parsing; obstacle "r" is degrees in the file.
Mission mission_from_json(const Json& j);
TestCase test_case_from_json(const Json& j);

/// Report for report.json; `trajectory_file` names the CSV written beside it.
Json report_to_json(const EvaluationReport& r, const FilterPolicy& policy,
                    std::string_view trajectory_file);

struct SuiteEntry {
  const EvaluationReport* report;
  std::string file;
};
Json campaign_to_json(const CampaignResult& result, const CampaignOptions& options, std::uint64_t seed,
                      const std::vector<SuiteEntry>& files);
Json timing_to_json(const CampaignStats& stats, int workers);

/// Header "t,x,y,z,yaw,min_dist"; yaw in radians; "inf" when there are no obstacles.
std::string trajectory_csv(const Trajectory& traj);
/// index,outcome,verdict,min_dist,time_of_min,steps
std::string campaign_cases_csv(const std::vector<EvaluationReport>& evaluated);

struct PlotScene {
  ArenaRect arena;
  std::vector<CuboidObstacle> obstacles;
  std::optional<FlightSegment> soi;
};
/// Top-down plot: arena border, dashed SoI, filled obstacles, flight path and
/// a marker at the closest approach.
std::string trajectory_svg(const PlotScene& scene, const Trajectory* traj);

/// Binary 16-bit PGM, depth in millimetres, 0 for no hit.
std::string depth_pgm(const DepthImage& img);
/// One "x y z" line per point.
std::string cloud_xyz(const PointCloud& cloud);
/// One JSON object per node: index, position, yaw, cost, parent index.
std::string tree_jsonl(const LookaheadTree& tree, std::optional<std::size_t> chosen);

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);
/// Pretty-printed JSON with a trailing newline.
std::string dump_json(const Json& j);

}  // namespace lfs
