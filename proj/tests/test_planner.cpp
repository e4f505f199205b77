#include <gtest/gtest.h>

#include <random>

#include "lfs/planner.hpp"

using namespace lfs;

namespace {

constexpr double kBin = deg_to_rad(6.0);

// Brute-force binning: every bin is tested against the point by its centre angle.
std::vector<double> oracle_histogram(const std::vector<Vec3>& pts, const Vec3& origin, const PlannerParams& p) {
  const int n_az = 60, n_el = 30;
  std::vector<double> w(static_cast<std::size_t>(n_az) * n_el, 0.0);
  for (const Vec3& q : pts) {
    const double dx = q.x - origin.x, dy = q.y - origin.y, dz = q.z - origin.z;
    const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
    if (r > p.histogram_radius_m) continue;
    const double az = std::atan2(dy, dx);
    const double el = std::atan2(dz, std::hypot(dx, dy));
    const double margin = std::atan(p.obstacle_inflation_m / r);
    const int own_i = static_cast<int>((az + kPi) / kBin), own_j = static_cast<int>((el + kPi / 2) / kBin);
    for (int j = 0; j < n_el; ++j) {
      for (int i = 0; i < n_az; ++i) {
        const double ca = -kPi + (i + 0.5) * kBin, ce = -kPi / 2 + (j + 0.5) * kBin;
        double da = std::fmod(std::abs(ca - az), 2 * kPi);
        if (da > kPi) da = 2 * kPi - da;
        const bool inside = da <= margin && std::abs(ce - el) <= margin;
        if (inside || (i == own_i && j == own_j)) w[static_cast<std::size_t>(j) * n_az + i] += 1.0 / (r * r);
      }
    }
  }
  return w;
}

// Grid of points on the plane x = dist covering azimuth [-half, half] and z in [z0 - 1, z0 + 1].
PointCloud wall_cloud(double dist, double half_deg, double z0, double spacing = 0.05) {
  PointCloud c;
  const double y_max = dist * std::tan(deg_to_rad(half_deg));
  for (double y = -y_max; y <= y_max + 1e-9; y += spacing)
    for (double z = z0 - 1.0; z <= z0 + 1.0 + 1e-9; z += spacing) c.points.push_back({dist, y, z});
  return c;
}

PointCloud random_cloud(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-9, 9);
  PointCloud c;
  for (int k = 0; k < n; ++k) c.points.push_back({u(rng), u(rng), 2.5 + u(rng) / 4});
  return c;
}

}  // namespace

TEST(PlannerParams, DefaultsValid) {
  PlannerParams p;
  EXPECT_TRUE(p.valid());
  p.tree_depth = 0;
  EXPECT_FALSE(p.valid());
  p = {};
  p.bin_resolution_deg = 7.0;  // does not divide 180
  EXPECT_FALSE(p.valid());
  p = {};
  p.goal_weight = -1;
  EXPECT_FALSE(p.valid());
}

TEST(Histogram, EmptyCloudIsZero) {
  const PolarHistogram h = build_histogram({}, {0, 0, 0}, {});
  EXPECT_EQ(h.azimuth_bins(), 60);
  EXPECT_EQ(h.elevation_bins(), 30);
  for (int j = 0; j < h.elevation_bins(); ++j)
    for (int i = 0; i < h.azimuth_bins(); ++i) EXPECT_EQ(h.weight(i, j), 0.0);
}

TEST(Histogram, SinglePointEast) {
  PlannerParams p;
  const Vec3 o{1, 2, 3};
  PointCloud c;
  c.points.push_back({6, 2.1, 3});
  const PolarHistogram h = build_histogram(c, o, p);
  const double r = std::hypot(5.0, 0.1);
  const int own_i = h.azimuth_index(std::atan2(0.1, 5.0));
  const int own_j = h.elevation_index(0.0);
  EXPECT_EQ(own_i, 30);
  EXPECT_EQ(own_j, 15);
  EXPECT_DOUBLE_EQ(h.weight(own_i, own_j), 1.0 / (r * r));
  // margin atan(0.5/5) ~ 5.7 degrees reaches the neighbour centres at -3 and +9 degrees
  // in azimuth and -3 degrees in elevation
  const auto ref = oracle_histogram(c.points, o, p);
  int nonzero = 0;
  for (int j = 0; j < 30; ++j)
    for (int i = 0; i < 60; ++i) {
      EXPECT_DOUBLE_EQ(h.weight(i, j), ref[static_cast<std::size_t>(j) * 60 + i]) << i << "," << j;
      nonzero += h.weight(i, j) > 0;
    }
  EXPECT_GT(nonzero, 1);
  EXPECT_EQ(h.weight(own_i + 3, own_j), 0.0);
}

TEST(Histogram, MatchesBruteForceBinning) {
  std::mt19937_64 rng(11);
  PlannerParams p;
  for (int trial = 0; trial < 20; ++trial) {
    const PointCloud c = random_cloud(rng, 300);
    const Vec3 o{0.3, -0.2, 2.5};
    const PolarHistogram h = build_histogram(c, o, p);
    const auto ref = oracle_histogram(c.points, o, p);
    for (int j = 0; j < 30; ++j)
      for (int i = 0; i < 60; ++i) ASSERT_NEAR(h.weight(i, j), ref[static_cast<std::size_t>(j) * 60 + i], 1e-12);
  }
}

TEST(Histogram, ParallelMatchesReferenceExactly) {
  std::mt19937_64 rng(12);
  PlannerParams p;
  for (int trial = 0; trial < 10; ++trial) {
    const PointCloud c = random_cloud(rng, 5000);
    EXPECT_TRUE(build_histogram(c, {0, 0, 2.5}, p) == build_histogram_reference(c, {0, 0, 2.5}, p));
  }
}

TEST(Histogram, PointsBeyondRadiusIgnored) {
  PointCloud c;
  c.points.push_back({8.5, 0, 0});
  EXPECT_TRUE(build_histogram(c, {0, 0, 0}, {}) == PolarHistogram(6.0, {0, 0, 0}));
}

TEST(Histogram, DenseWallBlocksItsAzimuthSpan) {
  PlannerParams p;
  const PolarHistogram h = build_histogram(wall_cloud(5.0, 30.0, 0.0), {0, 0, 0}, p);
  for (int i = 0; i < h.azimuth_bins(); ++i) {
    const double az = rad_to_deg(h.bin_azimuth(i));
    if (az < -30.0 || az > 30.0) continue;
    for (int j : {14, 15}) EXPECT_GT(h.weight(i, j), p.occupancy_threshold) << az;
  }
}

TEST(Candidates, AllZeroGivesEveryBinInCap) {
  PlannerParams p;
  const auto c = candidate_directions(PolarHistogram(6.0, {}), p);
  EXPECT_EQ(c.size(), 60u * 6u);  // centres at +-3, +-9, +-15
  for (const auto& d : c) EXPECT_LE(std::abs(d.elevation), deg_to_rad(15.0) + 1e-9);
}

TEST(Candidates, SaturatedGivesNone) {
  PolarHistogram h(6.0, {});
  for (int j = 0; j < h.elevation_bins(); ++j)
    for (int i = 0; i < h.azimuth_bins(); ++i) h.add(i, j, 1.0);
  EXPECT_TRUE(candidate_directions(h, {}).empty());
}

TEST(Candidates, WallSpanExcluded) {
  PlannerParams p;
  const auto c = candidate_directions(build_histogram(wall_cloud(5.0, 30.0, 0.0), {0, 0, 0}, p), p);
  EXPECT_FALSE(c.empty());
  for (const auto& d : c) {
    if (std::abs(d.elevation) > kBin) continue;
    const double az = rad_to_deg(d.azimuth);
    EXPECT_FALSE(az >= -30.0 && az <= 30.0) << az;
  }
}

TEST(NodeCost, AlignedIsZero) {
  EXPECT_EQ(node_cost({0.4, 0.0}, {0.4, 0.0}, 0.4, {}), 0.0);
}

TEST(NodeCost, CloserToGoalIsCheaper) {
  const Direction g{0.0, 0.0};
  for (double alpha : {0.01, 1.0, 10.0}) {
    PlannerParams p;
    p.goal_weight = alpha;
    EXPECT_LT(node_cost({deg_to_rad(10), 0}, g, deg_to_rad(25), p), node_cost({deg_to_rad(40), 0}, g, deg_to_rad(25), p));
  }
}

TEST(NodeCost, HandEvaluatedTrio) {
  // goal at 0, heading 30 deg; values worked out by hand in degrees then converted
  //   A (20, 0):   10*20 + 1*10 + 0     = 210
  //   B (-6, 6):   10*12 + 1*36 + 6     = 162
  //   C (33, -3):  10*36 + 1*3  + 3     = 366
  const Direction g{0.0, 0.0};
  const double h = deg_to_rad(30);
  PlannerParams p;
  const double a = node_cost({deg_to_rad(20), 0}, g, h, p);
  const double b = node_cost({deg_to_rad(-6), deg_to_rad(6)}, g, h, p);
  const double c = node_cost({deg_to_rad(33), deg_to_rad(-3)}, g, h, p);
  EXPECT_NEAR(a, deg_to_rad(210), 1e-12);
  EXPECT_NEAR(b, deg_to_rad(162), 1e-12);
  EXPECT_NEAR(c, deg_to_rad(366), 1e-12);
  EXPECT_LT(b, a);
  EXPECT_LT(a, c);
}

TEST(NodeCost, WrapsAroundPi) {
  PlannerParams p;
  p.heading_weight = 0;
  p.smoothness_weight = 0;
  EXPECT_NEAR(node_cost({kPi - 0.1, 0}, {-kPi + 0.1, 0}, 0, p), 10 * 0.2, 1e-12);
}

TEST(Plan, EmptySceneFollowsGoalBearing) {
  const Pose pose = make_pose({0, 0, 2.5}, 0.3);
  for (double bearing : {0.0, 0.5, -2.0, 3.0}) {
    const Vec3 goal{20 * std::cos(bearing), 20 * std::sin(bearing), 2.5};
    const PlanResult r = plan({}, pose, goal, std::nullopt, {});
    ASSERT_TRUE(r.next);
    const Vec3 step = r.next_node().position - pose.position;
    EXPECT_LE(angle_diff(std::atan2(step.y, step.x), bearing), kBin);
    EXPECT_NEAR(step.norm(), 2.0, 1e-9);
  }
}

TEST(Plan, GoalWithinOneStepReturnsGoal) {
  const Pose pose = make_pose({0, 0, 2.5}, 0);
  const Vec3 goal{1.5, 0.5, 2.5};
  const PlanResult r = plan({}, pose, goal, std::nullopt, {});
  ASSERT_TRUE(r.next);
  EXPECT_EQ(r.next_node().position, goal);
}

TEST(Plan, FrontalWallSendsUavThroughFreeBin) {
  PlannerParams p;
  const Pose pose = make_pose({0, 0, 2.5}, 0);
  const PointCloud wall = wall_cloud(4.0, 30.0, 2.5);
  const PlanResult r = plan(wall, pose, {20, 0, 2.5}, std::nullopt, p);
  ASSERT_TRUE(r.next);
  const Direction d = direction_to(pose.position, r.next_node().position);
  const PolarHistogram h = build_histogram(wall, pose.position, p);
  EXPECT_LT(h.weight_at(d), p.occupancy_threshold);
  EXPECT_GT(std::abs(rad_to_deg(d.azimuth)), 30.0);
}

TEST(Plan, SymmetricWallDeviatesTowardCurrentHeading) {
  PlannerParams p;
  const PointCloud wall = wall_cloud(4.0, 30.0, 2.5);
  for (double yaw_deg : {10.0, -10.0}) {
    const Pose pose = make_pose({0, 0, 2.5}, deg_to_rad(yaw_deg));
    const PlanResult r = plan(wall, pose, {20, 0, 2.5}, std::nullopt, p);
    ASSERT_TRUE(r.next);
    EXPECT_GT(r.next_node().position.y * yaw_deg, 0.0) << yaw_deg;

    // exhaustive check at the root: the cheapest free candidate lies on the same side
    const PolarHistogram h = build_histogram(wall, pose.position, p);
    double best = 1e300, best_az = 0;
    for (const auto& c : candidate_directions(h, p)) {
      const double cost = node_cost(c, {0, 0}, pose.yaw, p);
      if (cost < best) best = cost, best_az = c.azimuth;
    }
    EXPECT_GT(best_az * yaw_deg, 0.0);
  }
}

TEST(Plan, PrevTargetSetsHeadingTerm) {
  PlannerParams p;
  const PointCloud wall = wall_cloud(4.0, 30.0, 2.5);
  const Pose pose = make_pose({0, 0, 2.5}, 0);
  const PlanResult left = plan(wall, pose, {20, 0, 2.5}, Vec3{1, 1, 2.5}, p);
  const PlanResult right = plan(wall, pose, {20, 0, 2.5}, Vec3{1, -1, 2.5}, p);
  ASSERT_TRUE(left.next && right.next);
  EXPECT_GT(left.next_node().position.y, 0.0);
  EXPECT_LT(right.next_node().position.y, 0.0);
}

TEST(Plan, EnclosedPoseHasNoResult) {
  PointCloud shell;
  for (int a = 0; a < 360; a += 2)
    for (int e = -80; e <= 80; e += 2) {
      const double az = deg_to_rad(a), el = deg_to_rad(e);
      shell.points.push_back({3 * std::cos(el) * std::cos(az), 3 * std::cos(el) * std::sin(az), 5 + 3 * std::sin(el)});
    }
  const PlanResult r = plan(shell, make_pose({0, 0, 5}, 0), {20, 0, 5}, std::nullopt, {});
  EXPECT_FALSE(r.next);
  EXPECT_EQ(r.tree.nodes.size(), 1u);
}

TEST(Plan, TreeStructure) {
  std::mt19937_64 rng(3);
  PlannerParams p;
  for (int trial = 0; trial < 10; ++trial) {
    const PointCloud c = random_cloud(rng, 400);
    const PlanResult r = plan(c, make_pose({0, 0, 2.5}, 0), {20, 3, 2.5}, std::nullopt, p);
    const auto& nodes = r.tree.nodes;
    EXPECT_FALSE(nodes[0].parent);
    for (std::size_t k = 1; k < nodes.size(); ++k) {
      ASSERT_TRUE(nodes[k].parent);
      const auto& par = nodes[*nodes[k].parent];
      EXPECT_LT(*nodes[k].parent, k);
      EXPECT_EQ(nodes[k].depth, par.depth + 1);
      EXPECT_LE(nodes[k].depth, p.tree_depth);
      EXPECT_NEAR(distance(nodes[k].position, par.position), p.node_step_m, 1e-9);
      EXPECT_LE(std::abs(nodes[k].direction.elevation), deg_to_rad(p.elevation_cap_deg) + 1e-9);
    }
    if (r.next) EXPECT_EQ(r.next_node().depth, 1);
  }
}

TEST(Plan, Deterministic) {
  std::mt19937_64 rng(8);
  const PointCloud c = random_cloud(rng, 2000);
  const PlanResult a = plan(c, make_pose({0, 0, 2.5}, 0), {20, 3, 2.5}, std::nullopt, {});
  const PlanResult b = plan(c, make_pose({0, 0, 2.5}, 0), {20, 3, 2.5}, std::nullopt, {});
  ASSERT_EQ(a.tree.nodes.size(), b.tree.nodes.size());
  EXPECT_EQ(a.next, b.next);
  for (std::size_t k = 0; k < a.tree.nodes.size(); ++k) EXPECT_EQ(a.tree.nodes[k].position, b.tree.nodes[k].position);
}

TEST(VoxelKey, GroupsByCell) {
  EXPECT_EQ(voxel_key({0.01, 0.02, 0.03}, 0.2), voxel_key({0.19, 0.1, 0.15}, 0.2));
  EXPECT_NE(voxel_key({0.01, 0, 0}, 0.2), voxel_key({0.21, 0, 0}, 0.2));
  EXPECT_NE(voxel_key({-0.01, 0, 0}, 0.2), voxel_key({0.01, 0, 0}, 0.2));
  EXPECT_NE(voxel_key({0, 0, 0.1}, 0.2), voxel_key({0, 0, 0.3}, 0.2));
}
