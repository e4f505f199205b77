#pragma once

// Vector-field-histogram local planner with a best-first lookahead tree.
//
// The point cloud is binned into a polar (azimuth x elevation) histogram
// around a query position. Bins under the occupancy threshold are candidate
// flight directions; the tree expands the cheapest candidates node by node,
// re-binning the same cloud from each node, and the UAV is sent to the first
// node of the best branch.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "lfs/geom.hpp"
#include "lfs/render.hpp"

namespace lfs {

struct PlannerParams {
  double bin_resolution_deg = 6.0;
  int tree_depth = 4;
  int children_per_node = 8;
  double node_step_m = 2.0;
  double goal_weight = 10.0;       // alpha
  double heading_weight = 1.0;     // beta
  double smoothness_weight = 1.0;  // gamma, penalises climb/descent
  double obstacle_inflation_m = 0.5;
  /// A single point at 10 m (0.01) stays below it, 20 points (0.2) exceed it.
  double occupancy_threshold = 0.1;
  /// Points farther than this from the query position are ignored.
  double histogram_radius_m = 8.0;
  double elevation_cap_deg = 15.0;
  /// Points below this height are treated as ground and dropped before planning.
  double min_point_height_m = 0.3;
  int max_expansions = 48;
  /// Sensed points are thinned to one per voxel of this size (0 disables).
  double voxel_size_m = 0.2;

  bool valid() const;
};

struct Direction {
  double azimuth = 0.0;    // radians, (-pi, pi]
  double elevation = 0.0;  // radians, [-pi/2, pi/2]
};

Direction direction_to(const Vec3& from, const Vec3& to);
Vec3 unit_vector(const Direction& d);

class PolarHistogram {
 public:
  PolarHistogram(double bin_resolution_deg, const Vec3& origin);

  int azimuth_bins() const { return az_bins_; }
  int elevation_bins() const { return el_bins_; }
  double resolution() const { return resolution_; }  // radians
  const Vec3& origin() const { return origin_; }

  double weight(int az, int el) const { return weights_[index(az, el)]; }
  void add(int az, int el, double w) { weights_[index(az, el)] += w; }

  int azimuth_index(double azimuth) const;
  int elevation_index(double elevation) const;
  double bin_azimuth(int az) const;
  double bin_elevation(int el) const;

  double weight_at(const Direction& d) const {
    return weight(azimuth_index(d.azimuth), elevation_index(d.elevation));
  }

  bool operator==(const PolarHistogram&) const = default;

 private:
  std::size_t index(int az, int el) const { return static_cast<std::size_t>(el) * az_bins_ + az; }

  double resolution_;
  int az_bins_;
  int el_bins_;
  Vec3 origin_;
  std::vector<double> weights_;
};

/// Each point within histogram_radius_m adds 1/r^2 to its bin and to every
/// bin whose centre lies within atan(inflation / r) of the point in both
/// azimuth and elevation. Per-point work runs under OpenMP; accumulation is
/// serial in cloud order so the result is bit-identical to the reference.
PolarHistogram build_histogram(const PointCloud& cloud, const Vec3& origin,
                               const PlannerParams& params);
PolarHistogram build_histogram_reference(const PointCloud& cloud, const Vec3& origin,
                                         const PlannerParams& params);

/// Free bin centres within the elevation cap, ordered by azimuth index then
/// elevation index. Empty when everything is blocked.
std::vector<Direction> candidate_directions(const PolarHistogram& hist, const PlannerParams& params);

/// alpha * (|d_az| + |d_el|) to the goal + beta * |d_az| to the previous
/// heading + gamma * |elevation|.
double node_cost(const Direction& node_dir, const Direction& goal_dir, double prev_heading,
                 const PlannerParams& params);

struct LookaheadNode {
  Vec3 position;
  double yaw = 0.0;
  Direction direction;
  int depth = 0;
  double accumulated_cost = 0.0;
  double total_cost = 0.0;  // accumulated + alpha * remaining angle to goal
  std::optional<std::size_t> parent;
};

struct LookaheadTree {
  std::vector<LookaheadNode> nodes;  // nodes[0] is the root
};

struct PlanResult {
  LookaheadTree tree;
  /// Index of the first node of the best branch; empty when the root has no free bin.
  std::optional<std::size_t> next;

  const LookaheadNode& next_node() const { return tree.nodes.at(*next); }
};

/// Packs the voxel containing p (21 bits per axis, wrapping) into one key.
std::uint64_t voxel_key(const Vec3& p, double voxel_size);

PlanResult plan(const PointCloud& cloud, const Pose& pose, const Vec3& goal,
                const std::optional<Vec3>& prev_target, const PlannerParams& params);

}  // namespace lfs
