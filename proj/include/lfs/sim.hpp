#pragma once

// Low-fidelity flight simulation: sense -> plan -> kinematic step, with each
// cycle presumed to take dt of flight time regardless of how long planning
// actually took.

#include <functional>
#include <span>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "lfs/geom.hpp"
#include "lfs/planner.hpp"
#include "lfs/render.hpp"

namespace lfs {

/// How forward progress scales once the required turn exceeds the yaw gate.
enum class FractionRule {
  Inverse,  // v_max * dt * min(1, yaw_step / turn)
  Direct,   // v_max * dt * min(1, turn / yaw_step)
};

struct KinematicParams {
  double v_max = 3.0;                       // m/s
  double yaw_rate_max = deg_to_rad(13.5);   // rad/s
  double dt = 0.1;                          // s per planning cycle
  double yaw_gate_fraction = 1.0 / 3.0;
  FractionRule fraction_rule = FractionRule::Inverse;

  bool valid() const;
  double max_step_distance() const { return v_max * dt; }
  double max_yaw_step() const { return yaw_rate_max * dt; }
};

/// One presumed cycle of motion toward target. The yaw turns toward the
/// bearing of the target by at most yaw_rate_max * dt; the UAV moves along the
/// straight line to the target, at full distance when the required turn is
/// under yaw_gate_fraction of the per-cycle yaw step and at a reduced distance
/// otherwise. Never overshoots the target.
Pose kinematic_step(const Pose& pose, const Vec3& target, const KinematicParams& k);

enum class PlanStatus { Initial, Planned, FailedToPlan };
enum class SimOutcome { ReachedGoal, Timeout, PlannerStuck, Collision };

std::string_view to_string(PlanStatus s);
std::string_view to_string(SimOutcome o);

struct TrajectorySample {
  double time = 0.0;
  Pose pose;
  double min_obstacle_distance = 0.0;  // +inf without obstacles
  PlanStatus status = PlanStatus::Initial;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  SimOutcome outcome = SimOutcome::Timeout;
};

struct SimConfig {
  KinematicParams kinematics;
  CameraIntrinsics intrinsics = default_intrinsics();
  CameraExtrinsics extrinsics;
  int cloud_stride = 4;
  PlannerParams planner;
  double goal_tolerance_m = 1.0;
  int max_steps = 1000;
  double cruise_altitude_m = 2.5;
  int max_consecutive_failures = 10;
  /// Distance the simulated leg starts before and ends after the segment of interest.
  double approach_margin_m = 5.0;
  DistanceMode distance_mode = DistanceMode::Solid3d;
  /// Plan on every point observed so far rather than on the current frame
  /// alone, so obstacles that left the field of view stay blocked.
  bool obstacle_memory = true;

  /// Throws lfs::Error(InvalidConfig) naming the offending field.
  void validate() const;
};

/// Observed points thinned to one per voxel, in first-seen order. Points
/// below min_height (ground returns) are not stored.
class ObstacleMemory {
 public:
  ObstacleMemory(double voxel_size, double min_height);
  void insert(const PointCloud& frame);
  const PointCloud& cloud() const { return cloud_; }

 private:
  double voxel_size_;
  double min_height_;
  std::unordered_set<std::uint64_t> seen_;
  PointCloud cloud_;
};

/// Called after each planning cycle; used for debug dumps.
struct StepView {
  int step = 0;
  const DepthImage& depth;
  const PointCloud& cloud;  // current frame only
  const PlanResult& plan;
};
using StepObserver = std::function<void(const StepView&)>;

/// Requires start to be outside every obstacle (throws InvalidConfig otherwise).
Trajectory simulate(const Vec3& goal, const Pose& start, std::span<const CuboidObstacle> obstacles,
                    const SimConfig& cfg, const StepObserver& observer = {});

}  // namespace lfs
