#pragma once

// Depth rendering of an obstacle scene (cuboids plus the ground plane) from
// the UAV's camera, and back-projection of the depth image to a world-frame
// point cloud. Stands in for the stereo camera of the full simulator.

#include <span>
#include <vector>

#include "lfs/geom.hpp"

namespace lfs {

struct CameraIntrinsics {
  int width = 640;
  int height = 480;
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  double max_range = 15.0;

  /// Square pixels with the principal point at the image centre.
  static CameraIntrinsics from_hfov(int width, int height, double hfov_rad, double max_range);
  bool valid() const;
};

/// Default camera: 640x480, 86 degree horizontal FOV, 15 m range.
CameraIntrinsics default_intrinsics();

/// Camera mount relative to the UAV body (x forward, y left, z up).
/// Zero pitch looks along the UAV heading; positive pitch looks up.
struct CameraExtrinsics {
  Vec3 mount_translation;
  double mount_pitch = 0.0;
};

/// Z-depth along the optical axis, row-major. kNoHit marks pixels where
/// nothing lies within max_range.
struct DepthImage {
  static constexpr double kNoHit = 0.0;

  CameraIntrinsics intrinsics;
  std::vector<double> data;

  double at(int u, int v) const { return data[static_cast<std::size_t>(v) * intrinsics.width + u]; }
  bool hit(int u, int v) const { return at(u, v) != kNoHit; }
};

struct PointCloud {
  std::vector<Vec3> points;
};

/// Camera origin and axes in the world frame. A pixel's ray is
/// forward + xn * right + yn * down with xn = (u - cx) / fx, yn = (v - cy) / fy,
/// so the ray parameter at a hit equals its z-depth.
struct CameraFrame {
  Vec3 origin;
  Vec3 forward;
  Vec3 right;
  Vec3 down;

  static CameraFrame from_pose(const Pose& pose, const CameraExtrinsics& extr);
  Vec3 ray(const CameraIntrinsics& intr, double u, double v) const;
};

/// Nearest hit along origin + t * dir for t > 0, or +inf. Cuboids occupy z in [0, h];
/// the ground is the plane z = 0.
double ray_cuboid_hit(const Vec3& origin, const Vec3& dir, const CuboidObstacle& obs);
double ray_ground_hit(const Vec3& origin, const Vec3& dir);

/// OpenMP over image rows. Output is bit-identical to render_depth_reference.
DepthImage render_depth(std::span<const CuboidObstacle> scene, const Pose& pose,
                        const CameraIntrinsics& intr, const CameraExtrinsics& extr);

/// Serial per-pixel loop, kept as the reference for the parallel kernel.
DepthImage render_depth_reference(std::span<const CuboidObstacle> scene, const Pose& pose,
                                  const CameraIntrinsics& intr, const CameraExtrinsics& extr);

/// Back-projects every stride-th pixel (in both axes) with a hit.
PointCloud depth_to_cloud(const DepthImage& img, const Pose& pose, const CameraExtrinsics& extr,
                          int stride = 1);

}  // namespace lfs
