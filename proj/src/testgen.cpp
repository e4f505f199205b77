#include "lfs/testgen.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "lfs/error.hpp"

namespace lfs {

namespace {

std::string format_num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// Moves the obstacle inside the arena along x and y without rotating it.
std::optional<CuboidObstacle> clamp_into(const CuboidObstacle& obs, const ArenaRect& arena) {
  const auto verts = base_vertices(obs);
  double min_x = verts[0].x, max_x = verts[0].x, min_y = verts[0].y, max_y = verts[0].y;
  for (const auto& v : verts) {
    min_x = std::min(min_x, v.x);
    max_x = std::max(max_x, v.x);
    min_y = std::min(min_y, v.y);
    max_y = std::max(max_y, v.y);
  }
  if (max_x - min_x > arena.x_max - arena.x_min || max_y - min_y > arena.y_max - arena.y_min)
    return std::nullopt;

  constexpr double kInward = 1e-9;
  CuboidObstacle out = obs;
  if (min_x < arena.x_min) out.center_x += arena.x_min - min_x + kInward;
  else if (max_x > arena.x_max) out.center_x -= max_x - arena.x_max + kInward;
  if (min_y < arena.y_min) out.center_y += arena.y_min - min_y + kInward;
  else if (max_y > arena.y_max) out.center_y -= max_y - arena.y_max + kInward;
  if (!contains(arena, out)) return std::nullopt;
  return out;
}

}  // namespace

std::vector<Vec3> Mission::points() const {
  std::vector<Vec3> pts;
  pts.reserve(waypoints.size() + 2);
  pts.push_back(start);
  pts.insert(pts.end(), waypoints.begin(), waypoints.end());
  pts.push_back(landing);
  return pts;
}

void Mission::validate() const {
  if (waypoints.empty()) throw Error(ErrorCode::InvalidConfig, "mission needs at least one waypoint");
  const auto pts = points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!pts[i].finite()) throw Error(ErrorCode::InvalidConfig, "mission point is not finite");
    if (i > 0 && pts[i] == pts[i - 1])
      throw Error(ErrorCode::InvalidConfig, "mission has two identical consecutive points");
  }
}

void GeneratorConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::InvalidConfig, std::string("invalid generator config: ") + what);
  };
  require(arena.valid(), "arena needs x_min < x_max and y_min < y_max");
  require(obstacle_width > 0.0 && obstacle_height > 0.0, "obstacle width and height must be > 0");
  require(diagonal_min > obstacle_width, "diagonal_min must exceed obstacle_width");
  require(diagonal_min <= diagonal_max, "diagonal_min must not exceed diagonal_max");
  require(rotation_min > kPi / 2 && rotation_max < kPi && rotation_min <= rotation_max,
          "rotation range must lie inside (90, 180) degrees");
  require(gap_min > 0.0 && gap_min <= gap_max, "gap range needs 0 < gap_min <= gap_max");
  require(length_ratio > 0.0, "length_ratio must be > 0");
  require(max_draws >= 1 && placement_attempts >= 1 && max_candidates >= 1, "budgets must be >= 1");
  if (split_y_range) require(split_y_range->first <= split_y_range->second, "split_y_range");
}

Vec2 CanonicalTransform::apply(const Vec2& p) const {
  return {reflect_x ? 2.0 * center_x - p.x : p.x, reflect_y ? 2.0 * center_y - p.y : p.y};
}

Vec3 CanonicalTransform::apply(const Vec3& p) const {
  const Vec2 q = apply(p.xy());
  return {q.x, q.y, p.z};
}

double CanonicalTransform::apply_angle(double a) const {
  if (reflect_x) a = kPi - a;
  if (reflect_y) a = -a;
  return wrap_angle(a);
}

FlightSegment CanonicalTransform::apply(const FlightSegment& s) const {
  return {apply(s.start), apply(s.end)};
}

CuboidObstacle CanonicalTransform::apply(const CuboidObstacle& o) const {
  CuboidObstacle out = o;
  const Vec2 c = apply(o.center());
  out.center_x = c.x;
  out.center_y = c.y;
  out.rotation = apply_angle(o.rotation);
  return out;
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  engine_.seed(seq);
}

double Rng::uniform(double lo, double hi) {
  const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;  // [0, 1)
  return lo + (hi - lo) * u;
}

FlightSegment find_soi(const Mission& mission, const ArenaRect& arena) {
  const auto pts = mission.points();
  std::optional<FlightSegment> best;
  double best_offset = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Vec3& a = pts[i];
    const Vec3& b = pts[i + 1];
    const double dy = b.y - a.y;
    if (dy == 0.0) continue;
    if (std::min(a.y, b.y) > arena.y_min || std::max(a.y, b.y) < arena.y_max) continue;
    const double t_bottom = (arena.y_min - a.y) / dy;
    const double t_top = (arena.y_max - a.y) / dy;
    const Vec3 at_bottom = a + (b - a) * t_bottom;
    const Vec3 at_top = a + (b - a) * t_top;
    if (at_bottom.x < arena.x_min || at_bottom.x > arena.x_max || at_top.x < arena.x_min ||
        at_top.x > arena.x_max)
      continue;

    FlightSegment clipped = t_bottom < t_top ? FlightSegment{at_bottom, at_top}
                                             : FlightSegment{at_top, at_bottom};
    clipped.start.y = t_bottom < t_top ? arena.y_min : arena.y_max;
    clipped.end.y = t_bottom < t_top ? arena.y_max : arena.y_min;
    const double offset = std::abs(0.5 * (clipped.start.x + clipped.end.x) - arena.mid_x());
    if (offset < best_offset) {
      best_offset = offset;
      best = clipped;
    }
  }
  if (!best) {
    throw Error(ErrorCode::NoSoi, "no mission segment crosses both the top border (y = " +
                                      format_num(arena.y_max) + ") and the bottom border (y = " +
                                      format_num(arena.y_min) + ") of the obstacle arena");
  }
  return *best;
}

Canonicalized canonicalize(const FlightSegment& soi, const ArenaRect& arena) {
  CanonicalTransform t;
  t.center_x = arena.mid_x();
  t.center_y = arena.mid_y();
  const Vec2 dir = soi.direction_2d();
  t.reflect_y = dir.y < 0.0;
  const Vec2 dir_y = t.apply(soi.end).xy() - t.apply(soi.start).xy();
  t.reflect_x = dir_y.x < 0.0;
  return {t, t.apply(soi)};
}

double soi_x_at(const FlightSegment& soi, double y) {
  const double dy = soi.end.y - soi.start.y;
  return soi.start.x + (soi.end.x - soi.start.x) * (y - soi.start.y) / dy;
}

DrawResult evaluate_draw(const FlightSegment& soi, const GeneratorConfig& cfg,
                         const FirstObstacleDraw& draw) {
  DrawResult r;
  const ArenaRect& arena = cfg.arena;
  const double w = cfg.obstacle_width;
  const double d = draw.diagonal;
  if (!(d > w) || soi.end.y == soi.start.y) return r;
  const double l = std::sqrt(d * d - w * w);

  r.split_point = {soi_x_at(soi, draw.split_y), draw.split_y};

  // One third of the diagonal to the left of the SoI, two thirds to the right.
  const double left_room = std::min(soi.start.x, soi.end.x) - arena.x_min;
  const double right_room = arena.x_max - std::max(soi.start.x, soi.end.x);
  if (!(d / 3.0 < left_room && 2.0 * d / 3.0 < right_room)) {
    r.check = DrawCheck::Horizontal;
    return r;
  }
  if (!(draw.split_y + d / 2.0 < arena.y_max && draw.split_y - d / 2.0 > arena.y_min)) {
    r.check = DrawCheck::Vertical;
    return r;
  }

  const Vec2 soi_dir = soi.direction_2d() * (1.0 / soi.direction_2d().norm());
  const double rotation = wrap_angle(std::atan2(soi_dir.y, soi_dir.x) - draw.rotation_offset);
  const Vec2 part_b = unit_vector(rotation);
  const double angle = std::acos(std::clamp(dot(soi_dir, part_b), -1.0, 1.0));
  if (!(angle > kPi / 2 && angle < kPi)) {
    r.check = DrawCheck::Obtuse;
    return r;
  }

  const Vec2 center = r.split_point + part_b * (l / 6.0);
  r.obstacle = {center.x, center.y, l, w, cfg.obstacle_height, rotation};

  // Any rotation about the centre keeps the diagonal inside the arena.
  const double half = d / 2.0;
  if (!(center.x - half >= arena.x_min && center.x + half <= arena.x_max &&
        center.y - half >= arena.y_min && center.y + half <= arena.y_max) ||
      !contains(arena, r.obstacle)) {
    r.check = DrawCheck::RotationRobust;
    return r;
  }
  r.check = DrawCheck::Accepted;
  return r;
}

CuboidObstacle sample_first_obstacle(const FlightSegment& soi, const GeneratorConfig& cfg, Rng& rng) {
  const double y_lo = cfg.split_y_range ? cfg.split_y_range->first : cfg.arena.y_min;
  const double y_hi = cfg.split_y_range ? cfg.split_y_range->second : cfg.arena.y_max;
  for (int i = 0; i < cfg.max_draws; ++i) {
    FirstObstacleDraw draw;
    draw.diagonal = rng.uniform(cfg.diagonal_min, cfg.diagonal_max);
    draw.rotation_offset = rng.uniform(cfg.rotation_min, cfg.rotation_max);
    draw.split_y = rng.uniform(y_lo, y_hi);
    const DrawResult r = evaluate_draw(soi, cfg, draw);
    if (r.check == DrawCheck::Accepted) return r.obstacle;
  }
  throw Error(ErrorCode::SamplingExhausted, "no first obstacle satisfied the placement constraints in " +
                                                std::to_string(cfg.max_draws) + " draws");
}

CuboidObstacle second_obstacle_at(const CuboidObstacle& first, const GeneratorConfig& cfg, double gap,
                                  double lateral) {
  const Vec2 along = first.axis();
  const Vec2 forward = perp(along);
  CuboidObstacle second;
  second.length = cfg.length_ratio * first.length;
  second.width = cfg.obstacle_width;
  second.height = cfg.obstacle_height;
  second.rotation = wrap_angle(first.rotation + kPi / 2);
  const Vec2 c =
      first.center() + along * lateral + forward * (0.5 * first.width + gap + 0.5 * second.length);
  second.center_x = c.x;
  second.center_y = c.y;
  return second;
}

CuboidObstacle place_second_obstacle(const CuboidObstacle& first, const FlightSegment& soi,
                                     const GeneratorConfig& cfg, Rng& rng) {
  (void)soi;  // the forward side of the first obstacle faces along the canonical SoI
  const double half_w2 = 0.5 * cfg.obstacle_width;
  const double lat_hi = -first.length / 6.0;
  const double lat_lo = std::min(-0.5 * first.length + half_w2, lat_hi);
  for (int attempt = 0; attempt < cfg.placement_attempts; ++attempt) {
    const double gap = rng.uniform(cfg.gap_min, cfg.gap_max);
    const double lateral = rng.uniform(lat_lo, lat_hi);
    CuboidObstacle second = second_obstacle_at(first, cfg, gap, lateral);
    if (!second.valid()) continue;
    if (!contains(cfg.arena, second)) {
      auto clamped = clamp_into(second, cfg.arena);
      if (!clamped) continue;
      second = *clamped;
    }
    if (base_distance(first, second) > 0.0) return second;
  }
  throw Error(ErrorCode::PlacementFailed,
              "no contained, non-overlapping position for the second obstacle");
}

TestCase generate_one(const Mission& mission, const GeneratorConfig& cfg, std::uint64_t index) {
  cfg.validate();
  mission.validate();
  const FlightSegment soi = find_soi(mission, cfg.arena);
  const Canonicalized canon = canonicalize(soi, cfg.arena);
  const auto mission_pts = mission.points();

  Rng rng(cfg.rng_seed, index);
  for (int candidate = 0; candidate < cfg.max_candidates; ++candidate) {
    const CuboidObstacle first = sample_first_obstacle(canon.soi, cfg, rng);
    CuboidObstacle second;
    try {
      second = place_second_obstacle(first, canon.soi, cfg, rng);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::PlacementFailed) throw;
      continue;
    }

    TestCase tc;
    tc.mission = mission;
    tc.obstacles = {canon.transform.apply(first), canon.transform.apply(second)};
    tc.soi = soi;
    tc.seed = cfg.rng_seed;
    tc.index = index;
    tc.canonical_transform = canon.transform;
    const bool blocks_mission = std::any_of(mission_pts.begin(), mission_pts.end(), [&](const Vec3& p) {
      return point_obstacle_distance(p, tc.obstacles[0], DistanceMode::Planar2d) == 0.0 ||
             point_obstacle_distance(p, tc.obstacles[1], DistanceMode::Planar2d) == 0.0;
    });
    if (!blocks_mission) return tc;
  }
  throw Error(ErrorCode::SamplingExhausted, "no valid obstacle pair found for test case " +
                                                std::to_string(index) + " within " +
                                                std::to_string(cfg.max_candidates) + " candidates");
}

std::vector<TestCase> generate(const Mission& mission, const GeneratorConfig& cfg, std::size_t count) {
  std::vector<TestCase> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(generate_one(mission, cfg, i));
  return out;
}

}  // namespace lfs
