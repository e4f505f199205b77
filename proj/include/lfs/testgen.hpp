#pragma once

// Pseudo-random two-obstacle scenario generator.
//
// The mission segment crossing the arena nearest its vertical middle line is
// the segment of interest (SoI). In the canonical frame the SoI runs toward
// +y. The first obstacle crosses it at an obtuse angle so that one third of
// its long axis (part A) lies left of the SoI and two thirds (part B) right.
// The second obstacle stands perpendicular to the first, beyond it along the
// travel direction, on the part-A side, and is 1.75 times as long.

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "lfs/geom.hpp"

namespace lfs {

struct Mission {
  Vec3 start;
  std::vector<Vec3> waypoints;
  Vec3 landing;

  /// start, waypoints..., landing
  std::vector<Vec3> points() const;
  /// Throws InvalidConfig unless there is a waypoint and consecutive points differ.
  void validate() const;
};

struct GeneratorConfig {
  ArenaRect arena;
  double diagonal_min = 6.0;
  double diagonal_max = 18.0;
  double obstacle_width = 2.0;
  double obstacle_height = 20.0;
  /// Angle between the SoI travel direction and the part-B axis.
  double rotation_min = deg_to_rad(95.0);
  double rotation_max = deg_to_rad(160.0);
  double gap_min = 3.0;
  double gap_max = 8.0;
  double length_ratio = 1.75;
  std::uint64_t rng_seed = 1;
  /// Draw budget for one first obstacle.
  int max_draws = 1000;
  /// Second-obstacle positions tried per first obstacle.
  int placement_attempts = 20;
  /// First obstacles tried per test case before giving up.
  int max_candidates = 200;
  /// Range the split point's y is drawn from; the arena's y range when unset.
  std::optional<std::pair<double, double>> split_y_range;

  void validate() const;
};

/// Reflections about the arena's vertical (reflect_x) and horizontal
/// (reflect_y) centre lines. Each is an involution and they commute, so a
/// transform is its own inverse.
struct CanonicalTransform {
  bool reflect_x = false;
  bool reflect_y = false;
  double center_x = 0.0;
  double center_y = 0.0;

  bool is_identity() const { return !reflect_x && !reflect_y; }
  Vec2 apply(const Vec2& p) const;
  Vec3 apply(const Vec3& p) const;
  double apply_angle(double a) const;
  FlightSegment apply(const FlightSegment& s) const;
  CuboidObstacle apply(const CuboidObstacle& o) const;
};

struct TestCase {
  Mission mission;
  std::array<CuboidObstacle, 2> obstacles;
  FlightSegment soi;
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
  CanonicalTransform canonical_transform;
};

/// Deterministic generator stream: mt19937_64 seeded from (seed, index) with
/// uniform doubles built from the top 53 bits, so draws are reproducible
/// across standard libraries.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream);
  double uniform(double lo, double hi);

 private:
  std::mt19937_64 engine_;
};

/// Throws NoSoi if no mission segment crosses both the top and bottom borders.
FlightSegment find_soi(const Mission& mission, const ArenaRect& arena);

struct Canonicalized {
  CanonicalTransform transform;
  FlightSegment soi;
};

/// Reflects so the SoI travels toward +y and leans toward +x (or is vertical).
Canonicalized canonicalize(const FlightSegment& soi, const ArenaRect& arena);

/// One draw of the first obstacle's free parameters.
struct FirstObstacleDraw {
  double diagonal = 0.0;
  double rotation_offset = 0.0;  // angle from the SoI direction to the part-B axis
  double split_y = 0.0;
};

enum class DrawCheck { Accepted, Horizontal, Vertical, Obtuse, RotationRobust, Degenerate };

struct DrawResult {
  DrawCheck check = DrawCheck::Degenerate;
  CuboidObstacle obstacle;
  Vec2 split_point;
};

/// x of the canonical SoI at height y.
double soi_x_at(const FlightSegment& soi, double y);

/// Builds the first obstacle from a draw and evaluates the acceptance checks.
/// The SoI passes through split_point, one third of the long axis from the
/// part-A end; the centre sits l/6 beyond it toward part B.
DrawResult evaluate_draw(const FlightSegment& canonical_soi, const GeneratorConfig& cfg,
                         const FirstObstacleDraw& draw);

/// Rejection-samples a draw until every check passes. Throws SamplingExhausted.
CuboidObstacle sample_first_obstacle(const FlightSegment& canonical_soi, const GeneratorConfig& cfg,
                                     Rng& rng);

/// Perpendicular second obstacle, shifted back inside the arena when needed.
/// Throws PlacementFailed when no contained, non-overlapping position is found.
CuboidObstacle place_second_obstacle(const CuboidObstacle& first, const FlightSegment& canonical_soi,
                                     const GeneratorConfig& cfg, Rng& rng);

/// Second-obstacle placement before containment clamping, for a given gap and
/// lateral offset along the first obstacle's axis.
CuboidObstacle second_obstacle_at(const CuboidObstacle& first, const GeneratorConfig& cfg, double gap,
                                  double lateral);

/// Test case number `index` of the stream for cfg.rng_seed.
TestCase generate_one(const Mission& mission, const GeneratorConfig& cfg, std::uint64_t index);

std::vector<TestCase> generate(const Mission& mission, const GeneratorConfig& cfg, std::size_t count);

}  // namespace lfs
