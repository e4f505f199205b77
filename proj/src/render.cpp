#include "lfs/render.hpp"

#include <algorithm>
#include <limits>

namespace lfs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMinHit = 1e-9;

// One axis of the slab test. Returns false when the ray misses the slab.
inline bool clip_slab(double o, double d, double lo, double hi, double& t_near, double& t_far) {
  if (d == 0.0) return o >= lo && o <= hi;
  double t1 = (lo - o) / d;
  double t2 = (hi - o) / d;
  if (t1 > t2) std::swap(t1, t2);
  t_near = std::max(t_near, t1);
  t_far = std::min(t_far, t2);
  return t_near <= t_far;
}

// Obstacle with the camera origin already expressed in its local frame.
struct LocalBox {
  double cos_r, sin_r;
  double ox, oy, oz;
  double hl, hw, h;

  LocalBox(const CuboidObstacle& obs, const Vec3& origin)
      : cos_r(std::cos(obs.rotation)), sin_r(std::sin(obs.rotation)), oz(origin.z),
        hl(0.5 * obs.length), hw(0.5 * obs.width), h(obs.height) {
    const double dx = origin.x - obs.center_x;
    const double dy = origin.y - obs.center_y;
    ox = cos_r * dx + sin_r * dy;
    oy = -sin_r * dx + cos_r * dy;
  }

  double hit(const Vec3& dir) const {
    const double dx = cos_r * dir.x + sin_r * dir.y;
    const double dy = -sin_r * dir.x + cos_r * dir.y;
    double t_near = -kInf;
    double t_far = kInf;
    if (!clip_slab(ox, dx, -hl, hl, t_near, t_far)) return kInf;
    if (!clip_slab(oy, dy, -hw, hw, t_near, t_far)) return kInf;
    if (!clip_slab(oz, dir.z, 0.0, h, t_near, t_far)) return kInf;
    return t_near > kMinHit ? t_near : kInf;
  }
};

struct Scene {
  CameraFrame frame;
  std::vector<LocalBox> boxes;

  Scene(std::span<const CuboidObstacle> obstacles, const Pose& pose, const CameraExtrinsics& extr)
      : frame(CameraFrame::from_pose(pose, extr)) {
    boxes.reserve(obstacles.size());
    for (const auto& obs : obstacles) boxes.emplace_back(obs, frame.origin);
  }

  double pixel_depth(const CameraIntrinsics& intr, int u, int v) const {
    const Vec3 dir = frame.ray(intr, u, v);
    double t = ray_ground_hit(frame.origin, dir);
    for (const auto& box : boxes) t = std::min(t, box.hit(dir));
    if (t == kInf || t * dir.norm() > intr.max_range) return DepthImage::kNoHit;
    return t;
  }
};

DepthImage blank_image(const CameraIntrinsics& intr) {
  DepthImage img;
  img.intrinsics = intr;
  img.data.assign(static_cast<std::size_t>(intr.width) * intr.height, DepthImage::kNoHit);
  return img;
}

}  // namespace

CameraIntrinsics CameraIntrinsics::from_hfov(int width, int height, double hfov_rad, double max_range) {
  CameraIntrinsics intr;
  intr.width = width;
  intr.height = height;
  intr.fx = 0.5 * width / std::tan(0.5 * hfov_rad);
  intr.fy = intr.fx;
  intr.cx = 0.5 * width - 0.5;
  intr.cy = 0.5 * height - 0.5;
  intr.max_range = max_range;
  return intr;
}

bool CameraIntrinsics::valid() const {
  return width >= 1 && height >= 1 && fx > 0.0 && fy > 0.0 && max_range > 0.0 &&
         std::isfinite(cx) && std::isfinite(cy) && std::isfinite(fx) && std::isfinite(fy) &&
         std::isfinite(max_range);
}

CameraIntrinsics default_intrinsics() {
  return CameraIntrinsics::from_hfov(640, 480, deg_to_rad(86.0), 15.0);
}

CameraFrame CameraFrame::from_pose(const Pose& pose, const CameraExtrinsics& extr) {
  const double cy = std::cos(pose.yaw);
  const double sy = std::sin(pose.yaw);
  const Vec3 body_fwd{cy, sy, 0.0};
  const Vec3 body_left{-sy, cy, 0.0};
  const Vec3 up{0.0, 0.0, 1.0};

  const Vec3& m = extr.mount_translation;
  CameraFrame f;
  f.origin = pose.position + body_fwd * m.x + body_left * m.y + up * m.z;
  const double cp = std::cos(extr.mount_pitch);
  const double sp = std::sin(extr.mount_pitch);
  f.forward = body_fwd * cp + up * sp;
  f.down = body_fwd * sp - up * cp;
  f.right = body_left * -1.0;
  return f;
}

Vec3 CameraFrame::ray(const CameraIntrinsics& intr, double u, double v) const {
  const double xn = (u - intr.cx) / intr.fx;
  const double yn = (v - intr.cy) / intr.fy;
  return forward + right * xn + down * yn;
}

double ray_cuboid_hit(const Vec3& origin, const Vec3& dir, const CuboidObstacle& obs) {
  return LocalBox(obs, origin).hit(dir);
}

double ray_ground_hit(const Vec3& origin, const Vec3& dir) {
  if (dir.z >= 0.0 || origin.z <= 0.0) return kInf;
  return -origin.z / dir.z;
}

DepthImage render_depth(std::span<const CuboidObstacle> scene, const Pose& pose,
                        const CameraIntrinsics& intr, const CameraExtrinsics& extr) {
  const Scene s(scene, pose, extr);
  DepthImage img = blank_image(intr);
  const int w = intr.width;
  const int h = intr.height;
  double* out = img.data.data();
#pragma omp parallel for schedule(static)
  for (int v = 0; v < h; ++v) {
    double* row = out + static_cast<std::size_t>(v) * w;
    for (int u = 0; u < w; ++u) row[u] = s.pixel_depth(intr, u, v);
  }
  return img;
}

DepthImage render_depth_reference(std::span<const CuboidObstacle> scene, const Pose& pose,
                                  const CameraIntrinsics& intr, const CameraExtrinsics& extr) {
  const Scene s(scene, pose, extr);
  DepthImage img = blank_image(intr);
  for (int v = 0; v < intr.height; ++v)
    for (int u = 0; u < intr.width; ++u)
      img.data[static_cast<std::size_t>(v) * intr.width + u] = s.pixel_depth(intr, u, v);
  return img;
}

PointCloud depth_to_cloud(const DepthImage& img, const Pose& pose, const CameraExtrinsics& extr,
                          int stride) {
  stride = std::max(stride, 1);
  const CameraFrame frame = CameraFrame::from_pose(pose, extr);
  const CameraIntrinsics& intr = img.intrinsics;
  PointCloud cloud;
  cloud.points.reserve(static_cast<std::size_t>((intr.width + stride - 1) / stride) *
                       ((intr.height + stride - 1) / stride));
  for (int v = 0; v < intr.height; v += stride) {
    for (int u = 0; u < intr.width; u += stride) {
      const double depth = img.at(u, v);
      if (depth == DepthImage::kNoHit) continue;
      cloud.points.push_back(frame.origin + frame.ray(intr, u, v) * depth);
    }
  }
  return cloud;
}

}  // namespace lfs
