#pragma once

// Runs generated test cases through the low-fidelity simulator and keeps the
// ones predicted to bring the UAV closer than the violation threshold to an
// obstacle, for validation in the full simulator.

#include <cstddef>
#include <string_view>
#include <vector>

#include "lfs/sim.hpp"
#include "lfs/testgen.hpp"

namespace lfs {

enum class Verdict { PredictedViolation, Safe, Invalid };
std::string_view to_string(Verdict v);

struct FilterPolicy {
  double violation_threshold = 1.5;
  /// Closer than this is treated as a predicted crash and discarded.
  double lower_cutoff = 0.25;
  bool require_goal_reached = false;

  void validate() const;
};

struct EvaluationReport {
  TestCase test_case;
  SimOutcome outcome = SimOutcome::Timeout;
  double min_distance = 0.0;  // +inf when the scene has no obstacles
  double time_of_min = 0.0;
  Verdict verdict = Verdict::Invalid;
  double wall_clock_ms = 0.0;
  std::size_t steps = 0;  // planning cycles simulated
  Trajectory trajectory;
};

/// The simulated leg: the SoI extended by the approach margin at both ends,
/// flown at cruise altitude, starting with the UAV facing along it.
struct SimLeg {
  Pose start;
  Vec3 goal;
};
SimLeg mission_leg(const TestCase& tc, const SimConfig& cfg);

Verdict classify(SimOutcome outcome, double min_distance, const FilterPolicy& policy);

/// Minimum recorded distance over the trajectory and the time it occurred
/// (the first occurrence on ties).
std::pair<double, double> trajectory_minimum(const Trajectory& traj);

EvaluationReport evaluate(const TestCase& tc, const SimConfig& cfg, const FilterPolicy& policy,
                          const StepObserver& observer = {});

struct CampaignStats {
  std::size_t evaluated = 0;
  std::size_t predicted_violations = 0;
  std::size_t safe = 0;
  std::size_t invalid = 0;
  std::size_t total_steps = 0;
  double total_wall_clock_ms = 0.0;

  double mean_ms_per_simulation() const;
  double mean_ms_per_step() const;
};

struct CampaignResult {
  /// Predicted violations, ascending by min_distance (ties by candidate index).
  std::vector<EvaluationReport> suite;
  /// Every evaluated candidate in index order, without trajectories.
  std::vector<EvaluationReport> evaluated;
  CampaignStats stats;
};

struct CampaignOptions {
  std::size_t budget = 200;
  std::size_t target = 5;
  /// Worker threads; 0 picks the OpenMP default.
  int workers = 0;
};

/// Evaluates candidates 0, 1, 2, ... of the generator stream until `target`
/// predicted violations are found or `budget` candidates are used. Candidates
/// are evaluated in parallel batches but consumed in index order, so the
/// result does not depend on the worker count.
CampaignResult run_campaign(const Mission& mission, const GeneratorConfig& gen_cfg,
                            const SimConfig& sim_cfg, const FilterPolicy& policy,
                            const CampaignOptions& options);

}  // namespace lfs
