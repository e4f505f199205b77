#include "lfs/planner.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <unordered_set>

namespace lfs {

namespace {

struct BinnedPoint {
  bool used = false;
  int az = 0;
  int el = 0;
  double azimuth = 0.0;
  double elevation = 0.0;
  double weight = 0.0;
  double margin = 0.0;
};

BinnedPoint bin_point(const PolarHistogram& hist, const Vec3& p, const PlannerParams& params) {
  BinnedPoint b;
  const Vec3 d = p - hist.origin();
  const double r2 = dot(d, d);
  const double radius = params.histogram_radius_m;
  if (r2 < 1e-12 || r2 > radius * radius) return b;
  const double r = std::sqrt(r2);
  b.used = true;
  b.azimuth = std::atan2(d.y, d.x);
  b.elevation = std::asin(std::clamp(d.z / r, -1.0, 1.0));
  b.az = hist.azimuth_index(b.azimuth);
  b.el = hist.elevation_index(b.elevation);
  b.weight = 1.0 / r2;
  b.margin = std::atan2(params.obstacle_inflation_m, r);
  return b;
}

// Adds the point's weight to every bin whose centre lies within the
// inflation margin of the point's direction, and always to its own bin.
void accumulate(PolarHistogram& hist, const BinnedPoint& b) {
  const double res = hist.resolution();
  const int n_az = hist.azimuth_bins();
  const int n_el = hist.elevation_bins();
  // Bin k has its centre at -pi + (k + 0.5) * res (azimuth), -pi/2 + (k + 0.5) * res (elevation).
  const int i_lo = static_cast<int>(std::ceil((b.azimuth - b.margin + kPi) / res - 0.5));
  const int i_hi = static_cast<int>(std::floor((b.azimuth + b.margin + kPi) / res - 0.5));
  const int j_lo = std::max(0, static_cast<int>(std::ceil((b.elevation - b.margin + kPi / 2) / res - 0.5)));
  const int j_hi =
      std::min(n_el - 1, static_cast<int>(std::floor((b.elevation + b.margin + kPi / 2) / res - 0.5)));
  // A margin wider than half a turn would visit bins twice.
  const int span = std::min(i_hi - i_lo, n_az - 1);

  bool own_added = false;
  for (int j = j_lo; j <= j_hi; ++j) {
    for (int i = i_lo; i <= i_lo + span; ++i) {
      const int iw = ((i % n_az) + n_az) % n_az;
      own_added = own_added || (iw == b.az && j == b.el);
      hist.add(iw, j, b.weight);
    }
  }
  if (!own_added) hist.add(b.az, b.el, b.weight);
}

double remaining_angle(const Direction& heading, const Vec3& from, const Vec3& goal) {
  const Direction to_goal = direction_to(from, goal);
  return angle_diff(heading.azimuth, to_goal.azimuth) +
         std::abs(heading.elevation - to_goal.elevation);
}

}  // namespace

bool PlannerParams::valid() const {
  const double bins = 180.0 / bin_resolution_deg;
  return bin_resolution_deg > 0.0 && std::abs(bins - std::round(bins)) < 1e-9 && tree_depth >= 1 &&
         children_per_node >= 1 && node_step_m > 0.0 && goal_weight >= 0.0 &&
         heading_weight >= 0.0 && smoothness_weight >= 0.0 && obstacle_inflation_m >= 0.0 &&
         occupancy_threshold > 0.0 && histogram_radius_m > 0.0 && elevation_cap_deg >= 0.0 &&
         max_expansions >= 1 && voxel_size_m >= 0.0;
}

std::uint64_t voxel_key(const Vec3& p, double voxel_size) {
  auto cell = [&](double v) {
    return static_cast<std::uint64_t>(static_cast<std::int64_t>(std::floor(v / voxel_size)) & 0x1fffff);
  };
  return cell(p.x) | cell(p.y) << 21 | cell(p.z) << 42;
}

Direction direction_to(const Vec3& from, const Vec3& to) {
  const Vec3 d = to - from;
  const double horiz = std::hypot(d.x, d.y);
  return {std::atan2(d.y, d.x), std::atan2(d.z, horiz)};
}

Vec3 unit_vector(const Direction& d) {
  const double ce = std::cos(d.elevation);
  return {ce * std::cos(d.azimuth), ce * std::sin(d.azimuth), std::sin(d.elevation)};
}

PolarHistogram::PolarHistogram(double bin_resolution_deg, const Vec3& origin)
    : resolution_(deg_to_rad(bin_resolution_deg)),
      az_bins_(static_cast<int>(std::lround(360.0 / bin_resolution_deg))),
      el_bins_(static_cast<int>(std::lround(180.0 / bin_resolution_deg))),
      origin_(origin),
      weights_(static_cast<std::size_t>(az_bins_) * el_bins_, 0.0) {}

int PolarHistogram::azimuth_index(double azimuth) const {
  const int i = static_cast<int>(std::floor((wrap_angle(azimuth) + kPi) / resolution_));
  return std::clamp(i, 0, az_bins_ - 1);
}

int PolarHistogram::elevation_index(double elevation) const {
  const int j = static_cast<int>(std::floor((elevation + kPi / 2) / resolution_));
  return std::clamp(j, 0, el_bins_ - 1);
}

double PolarHistogram::bin_azimuth(int az) const { return -kPi + (az + 0.5) * resolution_; }
double PolarHistogram::bin_elevation(int el) const { return -kPi / 2 + (el + 0.5) * resolution_; }

PolarHistogram build_histogram(const PointCloud& cloud, const Vec3& origin,
                               const PlannerParams& params) {
  PolarHistogram hist(params.bin_resolution_deg, origin);
  const auto n = static_cast<std::ptrdiff_t>(cloud.points.size());
  std::vector<BinnedPoint> binned(cloud.points.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) binned[i] = bin_point(hist, cloud.points[i], params);
  for (const auto& b : binned)
    if (b.used) accumulate(hist, b);
  return hist;
}

PolarHistogram build_histogram_reference(const PointCloud& cloud, const Vec3& origin,
                                         const PlannerParams& params) {
  PolarHistogram hist(params.bin_resolution_deg, origin);
  for (const auto& p : cloud.points) {
    const BinnedPoint b = bin_point(hist, p, params);
    if (b.used) accumulate(hist, b);
  }
  return hist;
}

std::vector<Direction> candidate_directions(const PolarHistogram& hist, const PlannerParams& params) {
  const double cap = deg_to_rad(params.elevation_cap_deg) + 1e-9;
  std::vector<Direction> out;
  for (int i = 0; i < hist.azimuth_bins(); ++i) {
    for (int j = 0; j < hist.elevation_bins(); ++j) {
      const double el = hist.bin_elevation(j);
      if (std::abs(el) > cap) continue;
      if (hist.weight(i, j) < params.occupancy_threshold) out.push_back({hist.bin_azimuth(i), el});
    }
  }
  return out;
}

double node_cost(const Direction& node_dir, const Direction& goal_dir, double prev_heading,
                 const PlannerParams& params) {
  const double to_goal = angle_diff(node_dir.azimuth, goal_dir.azimuth) +
                         std::abs(node_dir.elevation - goal_dir.elevation);
  const double turn = angle_diff(node_dir.azimuth, prev_heading);
  return params.goal_weight * to_goal + params.heading_weight * turn +
         params.smoothness_weight * std::abs(node_dir.elevation);
}

PlanResult plan(const PointCloud& cloud, const Pose& pose, const Vec3& goal,
                const std::optional<Vec3>& prev_target, const PlannerParams& params) {
  PlanResult result;
  auto& nodes = result.tree.nodes;
  nodes.push_back({pose.position, pose.yaw, {pose.yaw, 0.0}, 0, 0.0, 0.0, std::nullopt});

  // Ground points and points no tree node can see are dropped once up front.
  const double reach = params.histogram_radius_m + params.tree_depth * params.node_step_m;
  PointCloud sensed;
  sensed.points.reserve(cloud.points.size());
  std::unordered_set<std::uint64_t> voxels;
  for (const auto& p : cloud.points) {
    if (p.z < params.min_point_height_m || distance(p, pose.position) > reach) continue;
    // First point of each voxel wins; the cloud order is deterministic.
    if (params.voxel_size_m > 0.0 && !voxels.insert(voxel_key(p, params.voxel_size_m)).second) continue;
    sensed.points.push_back(p);
  }

  const double goal_dist = distance(goal, pose.position);
  const Direction root_goal_dir = direction_to(pose.position, goal);
  const PolarHistogram root_hist = build_histogram(sensed, pose.position, params);

  if (goal_dist < 1e-9 ||
      (goal_dist <= params.node_step_m &&
       root_hist.weight_at(root_goal_dir) < params.occupancy_threshold)) {
    nodes.push_back({goal, root_goal_dir.azimuth, root_goal_dir, 1, 0.0, 0.0, 0});
    result.next = 1;
    return result;
  }

  double root_heading = pose.yaw;
  if (prev_target && distance(*prev_target, pose.position) > 1e-6)
    root_heading = direction_to(pose.position, *prev_target).azimuth;

  using Entry = std::pair<double, std::size_t>;  // (total cost, node index)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  open.push({0.0, 0});

  const double cap = deg_to_rad(params.elevation_cap_deg) + 1e-9;
  std::optional<std::size_t> leaf;
  int expansions = 0;
  while (!open.empty() && expansions < params.max_expansions) {
    const std::size_t current = open.top().second;
    open.pop();
    if (nodes[current].depth >= params.tree_depth) {
      leaf = current;
      break;
    }
    ++expansions;

    const LookaheadNode parent = nodes[current];
    const PolarHistogram hist =
        current == 0 ? root_hist : build_histogram(sensed, parent.position, params);
    const Direction goal_dir = direction_to(parent.position, goal);
    const double heading = current == 0 ? root_heading : parent.direction.azimuth;

    std::vector<Direction> cands;
    if (std::abs(goal_dir.elevation) <= cap && hist.weight_at(goal_dir) < params.occupancy_threshold)
      cands.push_back(goal_dir);
    const auto free_bins = candidate_directions(hist, params);
    cands.insert(cands.end(), free_bins.begin(), free_bins.end());
    if (cands.empty()) {
      if (current == 0) return result;
      continue;
    }

    std::vector<double> cost(cands.size());
    for (std::size_t k = 0; k < cands.size(); ++k)
      cost[k] = node_cost(cands[k], goal_dir, heading, params);
    std::vector<std::size_t> order(cands.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return cost[a] < cost[b]; });

    const std::size_t n_children =
        std::min(order.size(), static_cast<std::size_t>(params.children_per_node));
    for (std::size_t k = 0; k < n_children; ++k) {
      const Direction& dir = cands[order[k]];
      LookaheadNode child;
      child.position = parent.position + unit_vector(dir) * params.node_step_m;
      child.yaw = dir.azimuth;
      child.direction = dir;
      child.depth = parent.depth + 1;
      child.accumulated_cost = parent.accumulated_cost + cost[order[k]];
      child.total_cost =
          child.accumulated_cost + params.goal_weight * remaining_angle(dir, child.position, goal);
      child.parent = current;
      nodes.push_back(child);
      open.push({child.total_cost, nodes.size() - 1});
    }
  }

  if (nodes.size() == 1) return result;
  if (!leaf) {
    // Budget ran out: deepest node, then cheapest, then first created.
    std::size_t best = 1;
    for (std::size_t k = 2; k < nodes.size(); ++k) {
      const auto& a = nodes[k];
      const auto& b = nodes[best];
      if (a.depth > b.depth || (a.depth == b.depth && a.total_cost < b.total_cost)) best = k;
    }
    leaf = best;
  }

  std::size_t first = *leaf;
  while (nodes[first].depth > 1) first = *nodes[first].parent;
  result.next = first;
  return result;
}

}  // namespace lfs
