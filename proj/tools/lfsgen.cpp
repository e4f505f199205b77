// lfsgen: generate two-obstacle test cases, simulate them in the
// low-fidelity simulator and keep the ones predicted to violate the safety
// distance.
//
//   lfsgen generate --mission m.json --count 10 --out cases
//   lfsgen simulate cases/case_000000.json --out sim
//   lfsgen campaign --mission m.json --budget 200 --target 5 --out run
//   lfsgen export run/suite --out handoff
//
// Exit codes: 0 ok (simulate: SAFE), 10 PREDICTED_VIOLATION, 20 INVALID,
// 1 usage or config, 2 schema, 3 NO_SOI, 4 SAMPLING_EXHAUSTED,
// 5 PLACEMENT_FAILED, 6 I/O.

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "lfs/config.hpp"
#include "lfs/error.hpp"
#include "lfs/io.hpp"

namespace fs = std::filesystem;
using lfs::Json;

namespace {

enum Exit : int {
  kOk = 0,
  kUsage = 1,
  kSchema = 2,
  kNoSoi = 3,
  kSampling = 4,
  kPlacement = 5,
  kIo = 6,
  kPredictedViolation = 10,
  kInvalid = 20,
};

int exit_code(lfs::ErrorCode code) {
  switch (code) {
    case lfs::ErrorCode::InvalidConfig: return kUsage;
    case lfs::ErrorCode::Schema: return kSchema;
    case lfs::ErrorCode::NoSoi: return kNoSoi;
    case lfs::ErrorCode::SamplingExhausted: return kSampling;
    case lfs::ErrorCode::PlacementFailed: return kPlacement;
    case lfs::ErrorCode::Io: return kIo;
  }
  return kUsage;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  std::string mission;
  std::optional<std::size_t> count;
  std::optional<std::size_t> budget;
  std::optional<std::size_t> target;
  std::optional<int> workers;
  std::vector<std::string> inputs;  // simulate: one case; export: cases or directories
  bool dump_sensor = false;
  bool dump_tree = false;
};

struct Run {
  std::string command;
  Json snapshot;
  lfs::AppConfig cfg;
  Json inputs = Json::object();
  std::string started_at;
};

// Manifests hold the inputs of the run they describe; replaying one fills in
// whatever the command line leaves out.
Run resolve(const std::string& command, Options& opt) {
  Run run;
  run.command = command;
  run.started_at = utc_now();
  run.snapshot = lfs::default_config_json();
  if (!opt.config.empty()) {
    const Json file = lfs::read_json_file(opt.config);
    const bool manifest = file.is_object() && file.contains("tool") && file.contains("config");
    if (manifest && file.value("command", "") == command) {
      const Json& in = file.at("inputs");
      if (opt.mission.empty() && in.contains("mission")) opt.mission = in.at("mission").get<std::string>();
      if (!opt.count && in.contains("count")) opt.count = in.at("count").get<std::size_t>();
      if (opt.inputs.empty() && in.contains("cases"))
        opt.inputs = in.at("cases").get<std::vector<std::string>>();
    }
    lfs::merge_config(run.snapshot, lfs::load_config_layer(opt.config));
  }
  lfs::apply_env_overrides(run.snapshot, lfs::process_env);
  if (opt.seed) run.snapshot["seed"] = *opt.seed;
  if (opt.budget) run.snapshot["campaign"]["budget"] = *opt.budget;
  if (opt.target) run.snapshot["campaign"]["target"] = *opt.target;
  if (opt.workers) run.snapshot["campaign"]["workers"] = *opt.workers;
  run.cfg = lfs::config_from_json(run.snapshot);
  return run;
}

void write_json(const fs::path& path, const Json& doc, lfs::SchemaId schema, const std::string& what) {
  lfs::require_schema(doc, schema, what);
  lfs::write_text_file(path, lfs::dump_json(doc));
}

void write_manifest(const fs::path& out, const Run& run, const Options& opt) {
  Json m;
  m["tool"] = "lfsgen";
  m["version"] = std::string(lfs::kToolVersion);
  m["command"] = run.command;
  m["config_file"] = opt.config.empty() ? Json(nullptr) : Json(opt.config);
  m["seed"] = run.cfg.seed;
  m["inputs"] = run.inputs;
  m["config"] = run.snapshot;
  m["started_at"] = run.started_at;
  m["finished_at"] = utc_now();
  write_json(out / "manifest.json", m, lfs::SchemaId::Manifest, "manifest");
}

lfs::Mission load_mission(const std::string& path) {
  if (path.empty()) throw lfs::Error(lfs::ErrorCode::InvalidConfig, "--mission is required");
  return lfs::mission_from_json(lfs::read_json_file(path));
}

std::string case_name(std::uint64_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "case_%06llu", static_cast<unsigned long long>(index));
  return buf;
}

lfs::PlotScene scene_for(const lfs::TestCase& tc, const lfs::ArenaRect& arena) {
  return {arena, {tc.obstacles.begin(), tc.obstacles.end()}, tc.soi};
}

int cmd_generate(Options& opt) {
  Run run = resolve("generate", opt);
  const lfs::Mission mission = load_mission(opt.mission);
  const std::size_t count = opt.count.value_or(1);
  run.inputs = {{"mission", opt.mission}, {"count", count}};

  const auto cases = lfs::generate(mission, run.cfg.generator, count);
  const fs::path out = opt.out;
  for (const auto& tc : cases)
    write_json(out / (case_name(tc.index) + ".json"), lfs::test_case_to_json(tc), lfs::SchemaId::TestCase,
               "test case");
  write_manifest(out, run, opt);
  std::cout << "wrote " << cases.size() << " test case(s) to " << out.string() << "\n";
  return kOk;
}

int cmd_simulate(Options& opt) {
  Run run = resolve("simulate", opt);
  if (opt.inputs.size() != 1)
    throw lfs::Error(lfs::ErrorCode::InvalidConfig, "simulate takes exactly one test-case file");
  const std::string& case_path = opt.inputs.front();
  run.inputs = {{"cases", opt.inputs}, {"dump_sensor", opt.dump_sensor}, {"dump_tree", opt.dump_tree}};
  const lfs::TestCase tc = lfs::test_case_from_json(lfs::read_json_file(case_path));
  const fs::path out = opt.out;

  lfs::StepObserver observer;
  if (opt.dump_sensor || opt.dump_tree) {
    observer = [&](const lfs::StepView& v) {
      char stem[32];
      std::snprintf(stem, sizeof stem, "step_%04d", v.step);
      const fs::path dir = out / "debug";
      if (opt.dump_sensor) {
        lfs::write_text_file(dir / (std::string(stem) + "_depth.pgm"), lfs::depth_pgm(v.depth));
        lfs::write_text_file(dir / (std::string(stem) + "_cloud.xyz"), lfs::cloud_xyz(v.cloud));
      }
      if (opt.dump_tree) {
        lfs::write_text_file(dir / (std::string(stem) + "_tree.jsonl"), lfs::tree_jsonl(v.plan.tree, v.plan.next));
      }
    };
  }

  const lfs::EvaluationReport report = lfs::evaluate(tc, run.cfg.sim, run.cfg.policy, observer);
  lfs::write_text_file(out / "trajectory.csv", lfs::trajectory_csv(report.trajectory));
  lfs::write_text_file(out / "trajectory.svg",
                       lfs::trajectory_svg(scene_for(tc, run.cfg.generator.arena), &report.trajectory));
  write_json(out / "report.json", lfs::report_to_json(report, run.cfg.policy, "trajectory.csv"),
             lfs::SchemaId::Report, "report");
  write_manifest(out, run, opt);

  std::cout << lfs::to_string(report.verdict) << " outcome=" << lfs::to_string(report.outcome)
            << " min_distance=" << report.min_distance << " steps=" << report.steps << "\n";
  switch (report.verdict) {
    case lfs::Verdict::Safe: return kOk;
    case lfs::Verdict::PredictedViolation: return kPredictedViolation;
    case lfs::Verdict::Invalid: return kInvalid;
  }
  return kInvalid;
}

int cmd_campaign(Options& opt) {
  Run run = resolve("campaign", opt);
  const auto& copt = run.cfg.campaign;
  if (copt.budget < copt.target)
    throw lfs::Error(lfs::ErrorCode::InvalidConfig,
                     "budget (" + std::to_string(copt.budget) + ") is smaller than target (" +
                         std::to_string(copt.target) + ")");
  const lfs::Mission mission = load_mission(opt.mission);
  run.inputs = {{"mission", opt.mission}};

  const lfs::CampaignResult result =
      lfs::run_campaign(mission, run.cfg.generator, run.cfg.sim, run.cfg.policy, copt);
  const fs::path out = opt.out;
  std::vector<lfs::SuiteEntry> entries;
  for (std::size_t i = 0; i < result.suite.size(); ++i) {
    const lfs::EvaluationReport& r = result.suite[i];
    char prefix[16];
    std::snprintf(prefix, sizeof prefix, "%02zu_", i + 1);
    const std::string stem = prefix + case_name(r.test_case.index);
    const std::string file = "suite/" + stem + ".json";
    write_json(out / file, lfs::test_case_to_json(r.test_case), lfs::SchemaId::TestCase, "test case");
    lfs::write_text_file(out / "suite" / (stem + ".csv"), lfs::trajectory_csv(r.trajectory));
    lfs::write_text_file(out / "suite" / (stem + ".svg"),
                         lfs::trajectory_svg(scene_for(r.test_case, run.cfg.generator.arena), &r.trajectory));
    entries.push_back({&r, file});
  }
  write_json(out / "campaign.json", lfs::campaign_to_json(result, copt, run.cfg.seed, entries),
             lfs::SchemaId::Campaign, "campaign summary");
  lfs::write_text_file(out / "cases.csv", lfs::campaign_cases_csv(result.evaluated));

  int workers = copt.workers;
#ifdef _OPENMP
  if (workers <= 0) workers = omp_get_max_threads();
#endif
  write_json(out / "timing.json", lfs::timing_to_json(result.stats, std::max(workers, 1)), lfs::SchemaId::Timing,
             "timing");
  write_manifest(out, run, opt);

  const auto& st = result.stats;
  std::cout << "evaluated " << st.evaluated << ", predicted violations " << st.predicted_violations
            << ", safe " << st.safe << ", invalid " << st.invalid << "; mean "
            << st.mean_ms_per_step() << " ms/step\n";
  return kOk;
}

std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs) {
  std::vector<fs::path> files;
  for (const auto& in : inputs) {
    const fs::path p = in;
    if (!fs::is_directory(p)) {
      files.push_back(p);
      continue;
    }
    std::vector<fs::path> found;
    for (const auto& e : fs::directory_iterator(p)) {
      // Only test cases: skip manifests and summaries sharing the directory.
      const auto name = e.path().filename().string();
      const bool is_case = name.rfind("case_", 0) == 0 || name.find("_case_") != std::string::npos;
      if (is_case && e.path().extension() == ".json") found.push_back(e.path());
    }
    std::sort(found.begin(), found.end());
    files.insert(files.end(), found.begin(), found.end());
  }
  return files;
}

int cmd_export(Options& opt) {
  Run run = resolve("export", opt);
  if (opt.inputs.empty()) throw lfs::Error(lfs::ErrorCode::InvalidConfig, "export needs test-case files or directories");
  run.inputs = {{"cases", opt.inputs}};
  const fs::path out = opt.out;
  std::string index = "file,seed,index,soi_x0,soi_y0,soi_x1,soi_y1\n";
  const auto files = expand_inputs(opt.inputs);
  for (const auto& f : files) {
    const lfs::TestCase tc = lfs::test_case_from_json(lfs::read_json_file(f));
    const std::string stem = f.stem().string();
    write_json(out / (stem + ".json"), lfs::test_case_to_json(tc), lfs::SchemaId::TestCase, "test case");
    lfs::write_text_file(out / (stem + ".svg"),
                         lfs::trajectory_svg(scene_for(tc, run.cfg.generator.arena), nullptr));
    char row[256];
    std::snprintf(row, sizeof row, "%s.json,%llu,%llu,%.6f,%.6f,%.6f,%.6f\n", stem.c_str(),
                  static_cast<unsigned long long>(tc.seed), static_cast<unsigned long long>(tc.index),
                  tc.soi.start.x, tc.soi.start.y, tc.soi.end.x, tc.soi.end.y);
    index += row;
  }
  lfs::write_text_file(out / "index.csv", index);
  write_manifest(out, run, opt);
  std::cout << "exported " << files.size() << " test case(s) to " << out.string() << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-fidelity UAV test generation and filtering"};
  app.set_version_flag("--version", std::string(lfs::kToolVersion));
  app.require_subcommand(1);
  Options opt;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "Config file or run manifest to replay");
    sub->add_option("--seed", opt.seed, "Generator seed");
    sub->add_option("--out", opt.out, "Output directory")->capture_default_str();
  };

  auto* gen = app.add_subcommand("generate", "Generate test cases for a mission");
  common(gen);
  gen->add_option("--mission", opt.mission, "Mission JSON");
  gen->add_option("--count", opt.count, "Number of test cases")->check(CLI::PositiveNumber);

  auto* sim = app.add_subcommand("simulate", "Simulate one test case");
  common(sim);
  sim->add_option("case", opt.inputs, "Test-case JSON");
  sim->add_flag("--dump-sensor", opt.dump_sensor, "Write depth PGM and cloud XYZ per step");
  sim->add_flag("--dump-tree", opt.dump_tree, "Write the lookahead tree per step");

  auto* camp = app.add_subcommand("campaign", "Generate and filter until the target suite size");
  common(camp);
  camp->add_option("--mission", opt.mission, "Mission JSON");
  camp->add_option("--budget", opt.budget, "Candidates to evaluate at most");
  camp->add_option("--target", opt.target, "Predicted violations to collect");
  camp->add_option("--workers", opt.workers, "Worker threads (0 = all cores)");

  auto* exp = app.add_subcommand("export", "Re-serialize test cases with SVG previews");
  common(exp);
  exp->add_option("cases", opt.inputs, "Test-case files or directories");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*gen) return cmd_generate(opt);
    if (*sim) return cmd_simulate(opt);
    if (*camp) return cmd_campaign(opt);
    if (*exp) return cmd_export(opt);
  } catch (const lfs::Error& e) {
    std::cerr << "lfsgen: " << lfs::to_string(e.code()) << ": " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "lfsgen: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
