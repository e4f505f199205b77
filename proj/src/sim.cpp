#include "lfs/sim.hpp"

#include <algorithm>

#include "lfs/error.hpp"

namespace lfs {

bool KinematicParams::valid() const {
  return v_max > 0.0 && yaw_rate_max > 0.0 && dt > 0.0 && yaw_gate_fraction > 0.0 &&
         yaw_gate_fraction < 1.0 && std::isfinite(v_max) && std::isfinite(yaw_rate_max) &&
         std::isfinite(dt);
}

Pose kinematic_step(const Pose& pose, const Vec3& target, const KinematicParams& k) {
  const Vec3 delta = target - pose.position;
  const double dist = delta.norm();
  if (dist == 0.0) return pose;

  Pose next = pose;
  double turn = 0.0;
  if (std::hypot(delta.x, delta.y) > 1e-12) {
    const double diff = wrap_angle(std::atan2(delta.y, delta.x) - pose.yaw);
    turn = std::abs(diff);
    const double yaw_change = std::min(turn, k.max_yaw_step());
    next.yaw = wrap_angle(pose.yaw + std::copysign(yaw_change, diff));
  }

  double fraction = 1.0;
  if (turn >= k.yaw_gate_fraction * k.max_yaw_step()) {
    fraction = k.fraction_rule == FractionRule::Inverse ? std::min(1.0, k.max_yaw_step() / turn)
                                                        : std::min(1.0, turn / k.max_yaw_step());
  }
  const double travel = std::min(k.max_step_distance() * fraction, dist);
  next.position = travel == dist ? target : pose.position + delta * (travel / dist);
  return next;
}

std::string_view to_string(PlanStatus s) {
  switch (s) {
    case PlanStatus::Initial: return "INITIAL";
    case PlanStatus::Planned: return "PLANNED";
    case PlanStatus::FailedToPlan: return "FAILED_TO_PLAN";
  }
  return "?";
}

std::string_view to_string(SimOutcome o) {
  switch (o) {
    case SimOutcome::ReachedGoal: return "REACHED_GOAL";
    case SimOutcome::Timeout: return "TIMEOUT";
    case SimOutcome::PlannerStuck: return "PLANNER_STUCK";
    case SimOutcome::Collision: return "COLLISION";
  }
  return "?";
}

void SimConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::InvalidConfig, std::string("invalid simulation config: ") + what);
  };
  require(kinematics.valid(), "kinematics");
  require(intrinsics.valid(), "camera intrinsics");
  require(extrinsics.mount_translation.finite() && std::isfinite(extrinsics.mount_pitch),
          "camera extrinsics");
  require(cloud_stride >= 1, "cloud_stride must be >= 1");
  require(planner.valid(), "planner parameters");
  require(goal_tolerance_m > 0.0, "goal_tolerance_m must be > 0");
  require(max_steps >= 1, "max_steps must be >= 1");
  require(cruise_altitude_m > 0.0 && std::isfinite(cruise_altitude_m), "cruise_altitude_m");
  require(max_consecutive_failures >= 1, "max_consecutive_failures must be >= 1");
  require(approach_margin_m >= 0.0 && std::isfinite(approach_margin_m), "approach_margin_m");
}

ObstacleMemory::ObstacleMemory(double voxel_size, double min_height)
    : voxel_size_(voxel_size), min_height_(min_height) {}

void ObstacleMemory::insert(const PointCloud& frame) {
  for (const auto& p : frame.points) {
    if (p.z < min_height_) continue;
    if (voxel_size_ > 0.0 && !seen_.insert(voxel_key(p, voxel_size_)).second) continue;
    cloud_.points.push_back(p);
  }
}

Trajectory simulate(const Vec3& goal, const Pose& start, std::span<const CuboidObstacle> obstacles,
                    const SimConfig& cfg, const StepObserver& observer) {
  cfg.validate();
  if (!goal.finite() || !start.position.finite())
    throw Error(ErrorCode::InvalidConfig, "simulation start and goal must be finite");
  for (const auto& obs : obstacles)
    if (!obs.valid()) throw Error(ErrorCode::InvalidConfig, "invalid obstacle in scene");
  if (min_obstacle_distance(start.position, obstacles, DistanceMode::Solid3d) == 0.0)
    throw Error(ErrorCode::InvalidConfig, "simulation start lies inside an obstacle");

  Trajectory traj;
  traj.samples.reserve(static_cast<std::size_t>(cfg.max_steps) + 1);
  Pose pose = start;
  auto record = [&](int step, PlanStatus status) {
    traj.samples.push_back({step * cfg.kinematics.dt, pose,
                            min_obstacle_distance(pose.position, obstacles, cfg.distance_mode),
                            status});
  };

  record(0, PlanStatus::Initial);
  if (distance(pose.position, goal) <= cfg.goal_tolerance_m) {
    traj.outcome = SimOutcome::ReachedGoal;
    return traj;
  }

  std::optional<Vec3> prev_target;
  int failures = 0;
  ObstacleMemory memory(cfg.planner.voxel_size_m, cfg.planner.min_point_height_m);
  for (int step = 1; step <= cfg.max_steps; ++step) {
    const DepthImage depth = render_depth(obstacles, pose, cfg.intrinsics, cfg.extrinsics);
    const PointCloud cloud = depth_to_cloud(depth, pose, cfg.extrinsics, cfg.cloud_stride);
    if (cfg.obstacle_memory) memory.insert(cloud);
    const PlanResult planned =
        plan(cfg.obstacle_memory ? memory.cloud() : cloud, pose, goal, prev_target, cfg.planner);
    if (observer) observer(StepView{step, depth, cloud, planned});

    PlanStatus status = PlanStatus::FailedToPlan;
    if (planned.next) {
      const Vec3 target = planned.next_node().position;
      pose = kinematic_step(pose, target, cfg.kinematics);
      prev_target = target;
      failures = 0;
      status = PlanStatus::Planned;
    } else {
      ++failures;
    }
    record(step, status);

    if (traj.samples.back().min_obstacle_distance == 0.0) {
      traj.outcome = SimOutcome::Collision;
      return traj;
    }
    if (distance(pose.position, goal) <= cfg.goal_tolerance_m) {
      traj.outcome = SimOutcome::ReachedGoal;
      return traj;
    }
    if (failures >= cfg.max_consecutive_failures) {
      traj.outcome = SimOutcome::PlannerStuck;
      return traj;
    }
  }
  traj.outcome = SimOutcome::Timeout;
  return traj;
}

}  // namespace lfs
