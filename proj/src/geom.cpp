#include "lfs/geom.hpp"

#include <algorithm>
#include <limits>

namespace lfs {

double wrap_angle(double a) {
  double r = std::remainder(a, 2.0 * kPi);  // [-pi, pi]
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

double angle_diff(double a, double b) { return std::abs(wrap_angle(a - b)); }

bool CuboidObstacle::valid() const {
  const bool finite = std::isfinite(center_x) && std::isfinite(center_y) && std::isfinite(length) &&
                      std::isfinite(width) && std::isfinite(height) && std::isfinite(rotation);
  return finite && length > 0.0 && width > 0.0 && height > 0.0 && length >= width;
}

std::array<Vec2, 4> base_vertices(const CuboidObstacle& obs) {
  const double hl = 0.5 * obs.length;
  const double hw = 0.5 * obs.width;
  return {obs.to_world({hl, hw}), obs.to_world({-hl, hw}), obs.to_world({-hl, -hw}),
          obs.to_world({hl, -hw})};
}

double point_obstacle_distance(const Vec3& p, const CuboidObstacle& obs, DistanceMode mode) {
  const Vec2 local = obs.to_local(p.xy());
  const double hl = 0.5 * obs.length;
  const double hw = 0.5 * obs.width;
  const double dx = local.x - std::clamp(local.x, -hl, hl);
  const double dy = local.y - std::clamp(local.y, -hw, hw);
  if (mode == DistanceMode::Planar2d) return std::hypot(dx, dy);
  const double dz = p.z - std::clamp(p.z, 0.0, obs.height);
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double min_obstacle_distance(const Vec3& p, std::span<const CuboidObstacle> obstacles,
                             DistanceMode mode) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& obs : obstacles) best = std::min(best, point_obstacle_distance(p, obs, mode));
  return best;
}

std::optional<AxisCrossing> segment_line_intersection(const FlightSegment& seg,
                                                      const CuboidObstacle& obs) {
  const Vec2 p = seg.start.xy();
  const Vec2 r = seg.direction_2d();
  const Vec2 axis = obs.axis();
  const Vec2 q = obs.center() - axis * (0.5 * obs.length);
  const Vec2 s = axis * obs.length;

  const double denom = cross(r, s);
  const double scale = r.norm() * s.norm();
  if (scale == 0.0 || std::abs(denom) <= 1e-12 * scale) return std::nullopt;

  const Vec2 qp = q - p;
  const double t = cross(qp, s) / denom;  // along the segment
  const double u = cross(qp, r) / denom;  // along the axis
  if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) return std::nullopt;

  const double c = std::clamp(dot(r, s) / scale, -1.0, 1.0);
  return AxisCrossing{p + r * t, std::acos(c), u * obs.length};
}

bool contains(const ArenaRect& arena, const CuboidObstacle& obs) {
  const auto verts = base_vertices(obs);
  return std::all_of(verts.begin(), verts.end(), [&](const Vec2& v) { return arena.contains(v); });
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  const double t = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + ab * t)).norm();
}

namespace {

bool inside_base(const Vec2& p, const CuboidObstacle& obs) {
  const Vec2 local = obs.to_local(p);
  return std::abs(local.x) <= 0.5 * obs.length && std::abs(local.y) <= 0.5 * obs.width;
}

bool segments_cross(const Vec2& a0, const Vec2& a1, const Vec2& b0, const Vec2& b1) {
  const double d1 = cross(a1 - a0, b0 - a0);
  const double d2 = cross(a1 - a0, b1 - a0);
  const double d3 = cross(b1 - b0, a0 - b0);
  const double d4 = cross(b1 - b0, a1 - b0);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

}  // namespace

double base_distance(const CuboidObstacle& a, const CuboidObstacle& b) {
  const auto va = base_vertices(a);
  const auto vb = base_vertices(b);
  for (const auto& v : va)
    if (inside_base(v, b)) return 0.0;
  for (const auto& v : vb)
    if (inside_base(v, a)) return 0.0;

  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i) {
    const Vec2& a0 = va[i];
    const Vec2& a1 = va[(i + 1) % 4];
    for (int j = 0; j < 4; ++j) {
      const Vec2& b0 = vb[j];
      const Vec2& b1 = vb[(j + 1) % 4];
      if (segments_cross(a0, a1, b0, b1)) return 0.0;
      best = std::min({best, point_segment_distance(a0, b0, b1), point_segment_distance(b0, a0, a1)});
    }
  }
  return best;
}

}  // namespace lfs
