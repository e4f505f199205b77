#include "lfs/evaluator.hpp"

#include <algorithm>
#include <chrono>
#include <limits>

#include "lfs/error.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lfs {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::PredictedViolation: return "PREDICTED_VIOLATION";
    case Verdict::Safe: return "SAFE";
    case Verdict::Invalid: return "INVALID";
  }
  return "?";
}

void FilterPolicy::validate() const {
  if (!(lower_cutoff >= 0.0 && lower_cutoff < violation_threshold))
    throw Error(ErrorCode::InvalidConfig,
                "invalid filter policy: need 0 <= lower_cutoff < violation_threshold");
}

SimLeg mission_leg(const TestCase& tc, const SimConfig& cfg) {
  const Vec2 a = tc.soi.start.xy();
  const Vec2 b = tc.soi.end.xy();
  const Vec2 dir = (b - a) * (1.0 / (b - a).norm());
  const Vec2 start = a - dir * cfg.approach_margin_m;
  const Vec2 goal = b + dir * cfg.approach_margin_m;
  const double z = cfg.cruise_altitude_m;
  return {make_pose({start.x, start.y, z}, std::atan2(dir.y, dir.x)), {goal.x, goal.y, z}};
}

Verdict classify(SimOutcome outcome, double min_distance, const FilterPolicy& policy) {
  if (outcome == SimOutcome::Collision || outcome == SimOutcome::PlannerStuck) return Verdict::Invalid;
  if (policy.require_goal_reached && outcome != SimOutcome::ReachedGoal) return Verdict::Invalid;
  if (min_distance < policy.lower_cutoff) return Verdict::Invalid;
  if (min_distance < policy.violation_threshold) return Verdict::PredictedViolation;
  return Verdict::Safe;
}

std::pair<double, double> trajectory_minimum(const Trajectory& traj) {
  double best = std::numeric_limits<double>::infinity();
  double when = 0.0;
  for (const auto& s : traj.samples) {
    if (s.min_obstacle_distance < best) {
      best = s.min_obstacle_distance;
      when = s.time;
    }
  }
  return {best, when};
}

EvaluationReport evaluate(const TestCase& tc, const SimConfig& cfg, const FilterPolicy& policy,
                          const StepObserver& observer) {
  policy.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const SimLeg leg = mission_leg(tc, cfg);

  EvaluationReport report;
  report.test_case = tc;
  report.trajectory = simulate(leg.goal, leg.start, tc.obstacles, cfg, observer);
  report.outcome = report.trajectory.outcome;
  report.steps = report.trajectory.samples.size() - 1;
  std::tie(report.min_distance, report.time_of_min) = trajectory_minimum(report.trajectory);
  report.verdict = classify(report.outcome, report.min_distance, policy);
  report.wall_clock_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

double CampaignStats::mean_ms_per_simulation() const {
  return evaluated == 0 ? 0.0 : total_wall_clock_ms / static_cast<double>(evaluated);
}

double CampaignStats::mean_ms_per_step() const {
  return total_steps == 0 ? 0.0 : total_wall_clock_ms / static_cast<double>(total_steps);
}

CampaignResult run_campaign(const Mission& mission, const GeneratorConfig& gen_cfg,
                            const SimConfig& sim_cfg, const FilterPolicy& policy,
                            const CampaignOptions& options) {
  if (options.budget < options.target)
    throw Error(ErrorCode::InvalidConfig, "campaign budget must be at least the target");
  sim_cfg.validate();
  policy.validate();

  CampaignResult result;
  if (options.target == 0) return result;
  gen_cfg.validate();
  mission.validate();
  find_soi(mission, gen_cfg.arena);  // fail early with NoSoi

  int workers = options.workers;
#ifdef _OPENMP
  if (workers <= 0) workers = omp_get_max_threads();
#endif
  workers = std::max(workers, 1);
  const std::size_t batch = static_cast<std::size_t>(workers) * 2;

  std::size_t next_index = 0;
  while (next_index < options.budget && result.stats.predicted_violations < options.target) {
    const std::size_t n = std::min(batch, options.budget - next_index);
    std::vector<EvaluationReport> reports(n);
    std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic) num_threads(workers)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(n); ++k) {
      try {
        const TestCase tc = generate_one(mission, gen_cfg, next_index + static_cast<std::size_t>(k));
        reports[k] = evaluate(tc, sim_cfg, policy);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }

    for (std::size_t k = 0; k < n; ++k) {
      if (errors[k]) std::rethrow_exception(errors[k]);
      EvaluationReport& r = reports[k];
      auto& st = result.stats;
      ++st.evaluated;
      st.total_steps += r.steps;
      st.total_wall_clock_ms += r.wall_clock_ms;
      switch (r.verdict) {
        case Verdict::PredictedViolation: ++st.predicted_violations; break;
        case Verdict::Safe: ++st.safe; break;
        case Verdict::Invalid: ++st.invalid; break;
      }
      EvaluationReport summary = r;
      summary.trajectory.samples.clear();
      result.evaluated.push_back(std::move(summary));
      if (r.verdict == Verdict::PredictedViolation) result.suite.push_back(std::move(r));
      if (st.predicted_violations == options.target) break;
    }
    next_index += n;
  }

  std::stable_sort(result.suite.begin(), result.suite.end(),
                   [](const EvaluationReport& a, const EvaluationReport& b) {
                     return a.min_distance < b.min_distance;
                   });
  return result;
}

}  // namespace lfs
