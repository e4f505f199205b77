#pragma once

// Shared geometry: vectors, poses, the obstacle arena, flight segments and
// rotated-base cuboid obstacles.
//
// Frame: x east, y north, z up, ground plane at z = 0. Angles are radians,
// counter-clockwise from +x.

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>

namespace lfs {

constexpr double kPi = std::numbers::pi;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

/// Absolute shortest angular difference, in [0, pi].
double angle_diff(double a, double b);

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator-() const { return {-x, -y}; }
  bool operator==(const Vec2&) const = default;

  double norm() const { return std::hypot(x, y); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline Vec2 unit_vector(double angle) { return {std::cos(angle), std::sin(angle)}; }
/// Rotates by +90 degrees.
inline Vec2 perp(const Vec2& v) { return {-v.y, v.x}; }
inline Vec2 rotate(const Vec2& v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  bool operator==(const Vec3&) const = default;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  Vec2 xy() const { return {x, y}; }
  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

struct Pose {
  Vec3 position;
  double yaw = 0.0;  // (-pi, pi]
};

inline Pose make_pose(const Vec3& position, double yaw) { return {position, wrap_angle(yaw)}; }

/// The obstacle designated arena; borders are inclusive.
struct ArenaRect {
  double x_min = -20.0;
  double x_max = 20.0;
  double y_min = -20.0;
  double y_max = 20.0;

  bool valid() const { return x_min < x_max && y_min < y_max; }
  double mid_x() const { return 0.5 * (x_min + x_max); }
  double mid_y() const { return 0.5 * (y_min + y_max); }
  bool contains(const Vec2& p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
};

struct FlightSegment {
  Vec3 start;
  Vec3 end;

  bool valid() const { return !(start == end); }
  Vec2 direction_2d() const { return (end - start).xy(); }
};

/// Box with a rotated rectangular base standing on the ground.
struct CuboidObstacle {
  double center_x = 0.0;
  double center_y = 0.0;
  double length = 1.0;    // long base axis
  double width = 1.0;     // short base axis
  double height = 1.0;
  double rotation = 0.0;  // long axis angle from +x

  bool valid() const;
  Vec2 center() const { return {center_x, center_y}; }
  double diagonal() const { return std::hypot(length, width); }
  Vec2 axis() const { return unit_vector(rotation); }
  Vec2 to_local(const Vec2& p) const { return rotate(p - center(), -rotation); }
  Vec2 to_world(const Vec2& local) const { return center() + rotate(local, rotation); }
};

/// Base corners, counter-clockwise.
std::array<Vec2, 4> base_vertices(const CuboidObstacle& obs);

enum class DistanceMode { Solid3d, Planar2d };

/// Distance from p to the solid cuboid (z in [0, height]); 0 inside.
/// Planar2d ignores z and measures to the base rectangle.
double point_obstacle_distance(const Vec3& p, const CuboidObstacle& obs,
                               DistanceMode mode = DistanceMode::Solid3d);

/// Minimum over obstacles; +inf for an empty list.
double min_obstacle_distance(const Vec3& p, std::span<const CuboidObstacle> obstacles,
                             DistanceMode mode = DistanceMode::Solid3d);

/// Where a segment (projected to the ground) crosses an obstacle's long axis.
struct AxisCrossing {
  Vec2 point;
  /// Angle between the segment direction and the +rotation axis direction, in (0, pi).
  double angle = 0.0;
  /// Position of the crossing along the axis, measured from the -rotation end, in [0, length].
  double axis_param = 0.0;
};

std::optional<AxisCrossing> segment_line_intersection(const FlightSegment& seg,
                                                      const CuboidObstacle& obs);

/// All four base vertices inside the arena (inclusive).
bool contains(const ArenaRect& arena, const CuboidObstacle& obs);

/// Minimum distance between the two base rectangles; 0 when they touch or overlap.
double base_distance(const CuboidObstacle& a, const CuboidObstacle& b);

/// Shortest distance from p to the segment [a, b].
double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);

}  // namespace lfs
