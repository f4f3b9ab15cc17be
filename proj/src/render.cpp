#include "vvgc/render.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace vvgc {

std::size_t RenderBuffers::validCount() const {
  return static_cast<std::size_t>(std::count(mask.data.begin(), mask.data.end(), std::uint8_t{1}));
}

bool project(const VirtualView& view, const Vec3& world, Projection& out) {
  const Vec3 c = view.pose.toCamera(world);
  if (!(c.z > 0)) return false;
  out.u = view.intr.fx * c.x / c.z + view.intr.cx;
  out.v = view.intr.fy * c.y / c.z + view.intr.cy;
  out.z = c.z;
  return true;
}

bool pixelOf(const Intrinsics& intr, double u, double v, int& col, int& row) {
  const double fc = std::floor(u + 0.5), fr = std::floor(v + 0.5);
  if (!(fc >= 0 && fc < intr.width && fr >= 0 && fr < intr.height)) return false;
  col = static_cast<int>(fc);
  row = static_cast<int>(fr);
  return true;
}

RenderBuffers renderPoints(const PointCloud& cloud, const VirtualView& view, int splatRadius) {
  if (splatRadius < 0) throw Error(ErrorKind::BadInput, "splat radius must be non-negative");
  const int w = view.intr.width, h = view.intr.height;
  RenderBuffers b{DepthMap(w, h, kNoDepth), IdMap(w, h, kNoPoint), BitMask(w, h, 0)};
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    Projection p;
    int col, row;
    if (!project(view, cloud[i], p) || !pixelOf(view.intr, p.u, p.v, col, row)) continue;
    const float z = static_cast<float>(p.z);
    if (!(z > 0)) continue;
    const int r0 = std::max(0, row - splatRadius), r1 = std::min(h - 1, row + splatRadius);
    const int c0 = std::max(0, col - splatRadius), c1 = std::min(w - 1, col + splatRadius);
    for (int r = r0; r <= r1; ++r)
      for (int c = c0; c <= c1; ++c) {
        // Strict test: on equal depth the earlier (lower) index stays.
        if (z < b.depth.at(c, r)) {
          b.depth.at(c, r) = z;
          b.id.at(c, r) = static_cast<std::uint32_t>(i);
          b.mask.at(c, r) = 1;
        }
      }
  }
  return b;
}

namespace {

constexpr double kNear = 1e-6;

struct ScreenVertex {
  double x, y, invZ;
};

void rasterTriangle(std::array<ScreenVertex, 3> v, DepthMap& out) {
  auto edge = [](const ScreenVertex& a, const ScreenVertex& b, double px, double py) {
    return (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
  };
  double area = edge(v[0], v[1], v[2].x, v[2].y);
  if (area == 0 || !std::isfinite(area)) return;
  if (area < 0) {
    std::swap(v[1], v[2]);
    area = -area;
  }
  auto topLeft = [](const ScreenVertex& a, const ScreenVertex& b) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    return (dy == 0 && dx > 0) || dy < 0;
  };
  const bool tl0 = topLeft(v[1], v[2]), tl1 = topLeft(v[2], v[0]), tl2 = topLeft(v[0], v[1]);

  const double minX = std::min({v[0].x, v[1].x, v[2].x}), maxX = std::max({v[0].x, v[1].x, v[2].x});
  const double minY = std::min({v[0].y, v[1].y, v[2].y}), maxY = std::max({v[0].y, v[1].y, v[2].y});
  const int c0 = static_cast<int>(std::max(0.0, std::ceil(minX)));
  const int c1 = static_cast<int>(std::min(out.width - 1.0, std::floor(maxX)));
  const int r0 = static_cast<int>(std::max(0.0, std::ceil(minY)));
  const int r1 = static_cast<int>(std::min(out.height - 1.0, std::floor(maxY)));
  for (int r = r0; r <= r1; ++r)
    for (int c = c0; c <= c1; ++c) {
      const double e0 = edge(v[1], v[2], c, r), e1 = edge(v[2], v[0], c, r), e2 = edge(v[0], v[1], c, r);
      if (e0 < 0 || e1 < 0 || e2 < 0) continue;
      if ((e0 == 0 && !tl0) || (e1 == 0 && !tl1) || (e2 == 0 && !tl2)) continue;
      const double invZ = (e0 * v[0].invZ + e1 * v[1].invZ + e2 * v[2].invZ) / area;
      if (!(invZ > 0)) continue;
      const float z = static_cast<float>(1.0 / invZ);
      if (z < out.at(c, r)) out.at(c, r) = z;
    }
}

}  // namespace

DepthMap renderMeshDepth(const TriangleMesh& mesh, const VirtualView& view) {
  const Intrinsics& in = view.intr;
  DepthMap out(in.width, in.height, kNoDepth);
  std::vector<Vec3> cam(mesh.vertices.size());
  for (std::size_t i = 0; i < cam.size(); ++i) cam[i] = view.pose.toCamera(mesh.vertices[i]);
  auto toScreen = [&](const Vec3& p) {
    return ScreenVertex{in.fx * p.x / p.z + in.cx, in.fy * p.y / p.z + in.cy, 1.0 / p.z};
  };
  for (const auto& tri : mesh.triangles) {
    // Clip against the near plane; the result has at most four vertices.
    std::array<Vec3, 4> poly;
    int n = 0;
    for (int k = 0; k < 3; ++k) {
      const Vec3& a = cam[tri[k]];
      const Vec3& b = cam[tri[(k + 1) % 3]];
      const bool ina = a.z >= kNear, inb = b.z >= kNear;
      if (ina) poly[n++] = a;
      if (ina != inb) {
        const double s = (kNear - a.z) / (b.z - a.z);
        Vec3 p = a + (b - a) * s;
        p.z = kNear;
        poly[n++] = p;
      }
    }
    if (n < 3) continue;
    const ScreenVertex s0 = toScreen(poly[0]);
    for (int k = 1; k + 1 < n; ++k) rasterTriangle({s0, toScreen(poly[k]), toScreen(poly[k + 1])}, out);
  }
  return out;
}

DepthMap normalizeDepth(const RenderBuffers& buffers) {
  float lo = kNoDepth, hi = -kNoDepth;
  for (std::size_t i = 0; i < buffers.depth.size(); ++i)
    if (buffers.mask.data[i]) {
      lo = std::min(lo, buffers.depth.data[i]);
      hi = std::max(hi, buffers.depth.data[i]);
    }
  if (lo == kNoDepth) throw Error(ErrorKind::BadInput, "nothing rendered");
  DepthMap out = buffers.depth;
  for (std::size_t i = 0; i < out.size(); ++i)
    if (buffers.mask.data[i]) out.data[i] = hi > lo ? (out.data[i] - lo) / (hi - lo) : 0.0f;
  return out;
}

}  // namespace vvgc
