#pragma once

#include <array>
#include <string>
#include <vector>

#include "vvgc/core.hpp"

namespace vvgc {

// Row-major 3x3 matrix.
struct Mat3 {
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

  double operator()(int r, int c) const { return m[r * 3 + c]; }
  double& operator()(int r, int c) { return m[r * 3 + c]; }
  Vec3 row(int r) const { return {m[r * 3], m[r * 3 + 1], m[r * 3 + 2]}; }
  Vec3 operator*(const Vec3& v) const { return {dot(row(0), v), dot(row(1), v), dot(row(2), v)}; }
  Mat3 transposed() const;
  Vec3 transposedTimes(const Vec3& v) const;  // R^T v
  double determinant() const;
};

struct Intrinsics {
  double fx = 0, fy = 0, cx = 0, cy = 0;
  int width = 0, height = 0;
};

// 256x256, 60 degree vertical field of view, principal point at the image center.
Intrinsics defaultIntrinsics(int width = 256, int height = 256, double vfovDeg = 60.0);

// World to camera: x_c = R x_w + t. Camera looks along +z, x right, y down.
struct RigidPose {
  Mat3 rotation;
  Vec3 translation;

  Vec3 center() const { return -rotation.transposedTimes(translation); }
  Vec3 forward() const { return rotation.row(2); }
  Vec3 toCamera(const Vec3& world) const { return rotation * world + translation; }
};

struct VirtualView {
  RigidPose pose;
  Intrinsics intr;
  int id = 0;
};

RigidPose lookAt(const Vec3& eye, const Vec3& target, const Vec3& up);

// Re-expresses a view given in original coordinates in the normalized frame of `t`.
VirtualView viewToNormalized(const VirtualView& view, const NormTransform& t);

std::vector<VirtualView> sampleSpherical(const Aabb& bbox, int nAzimuth, int nElevation, double radiusFactor,
                                         const Intrinsics& intr = defaultIntrinsics());
// Appends one view at +85 and one at -85 degrees elevation.
void addPolarViews(std::vector<VirtualView>& views, const Aabb& bbox, double radiusFactor,
                   const Intrinsics& intr = defaultIntrinsics());
// 8 azimuths x 3 elevations plus one view near each pole.
std::vector<VirtualView> defaultSphericalViews(const Aabb& bbox, double radiusFactor = 1.5,
                                               const Intrinsics& intr = defaultIntrinsics());
std::vector<VirtualView> sampleGridNadir(const Aabb& bbox, double heightAgl, double overlap,
                                         const Intrinsics& intr = defaultIntrinsics());
std::vector<VirtualView> sampleGridOblique(const Aabb& bbox, double heightAgl, double overlap, double tiltDeg,
                                           const Intrinsics& intr = defaultIntrinsics());

std::vector<VirtualView> loadCustomViews(const std::string& path);
std::vector<VirtualView> parseViews(const std::string& json);
std::string viewsToJson(const std::vector<VirtualView>& views);
void saveViews(const std::string& path, const std::vector<VirtualView>& views);

}  // namespace vvgc
