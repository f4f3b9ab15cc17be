#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "vvgc/core.hpp"
#include "vvgc/viewgen.hpp"

namespace vvgc {

template <typename T>
struct Image {
  int width = 0, height = 0;
  std::vector<T> data;  // row-major

  Image() = default;
  Image(int w, int h, T fill) : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}
  T& at(int col, int row) { return data[static_cast<std::size_t>(row) * width + col]; }
  const T& at(int col, int row) const { return data[static_cast<std::size_t>(row) * width + col]; }
  std::size_t size() const { return data.size(); }
  bool sameShape(int w, int h) const { return width == w && height == h; }
};

inline constexpr float kNoDepth = std::numeric_limits<float>::infinity();
inline constexpr std::uint32_t kNoPoint = 0xFFFFFFFFu;

using DepthMap = Image<float>;          // camera-space z, +inf where empty
using IdMap = Image<std::uint32_t>;     // winning point index, kNoPoint where empty
using BitMask = Image<std::uint8_t>;    // 1 valid, 0 empty

struct RenderBuffers {
  DepthMap depth;
  IdMap id;
  BitMask mask;

  int width() const { return depth.width; }
  int height() const { return depth.height; }
  std::size_t validCount() const;
};

// Pinhole projection; returns false for points at or behind the camera plane.
struct Projection {
  double u = 0, v = 0, z = 0;
};
bool project(const VirtualView& view, const Vec3& world, Projection& out);
// Pixel whose center is nearest to (u, v); false when outside the image.
bool pixelOf(const Intrinsics& intr, double u, double v, int& col, int& row);

RenderBuffers renderPoints(const PointCloud& cloud, const VirtualView& view, int splatRadius = 1);

// Z-buffered rasterization with perspective-correct depth, top-left fill
// rule and no back-face culling.
DepthMap renderMeshDepth(const TriangleMesh& mesh, const VirtualView& view);

// Valid depths mapped affinely to [0,1] per image.
DepthMap normalizeDepth(const RenderBuffers& buffers);

}  // namespace vvgc
