#include "vvgc/render.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_util.hpp"

namespace vvgc {
namespace {

using testing::cloudOf;

// Camera at the origin looking down +z with identity rotation.
VirtualView axisView(int w = 256, int h = 256) {
  VirtualView v;
  v.pose = lookAt({0, 0, 0}, {0, 0, 1}, {0, -1, 0});
  v.intr = defaultIntrinsics(w, h);
  return v;
}

TriangleMesh square(double half, double z, double cx = 0, double cy = 0) {
  TriangleMesh m;
  m.vertices = {{cx - half, cy - half, z}, {cx + half, cy - half, z}, {cx + half, cy + half, z}, {cx - half, cy + half, z}};
  m.triangles = {{0, 1, 2}, {0, 2, 3}};
  return m;
}

void expectConsistent(const RenderBuffers& b) {
  ASSERT_TRUE(b.id.sameShape(b.width(), b.height()));
  ASSERT_TRUE(b.mask.sameShape(b.width(), b.height()));
  for (std::size_t i = 0; i < b.depth.size(); ++i) {
    const bool m = b.mask.data[i] != 0;
    EXPECT_EQ(m, std::isfinite(b.depth.data[i]));
    EXPECT_EQ(m, b.id.data[i] != kNoPoint);
    if (m) EXPECT_GT(b.depth.data[i], 0.0f);
  }
}

TEST(RenderPoints, OnAxisPoint) {
  const VirtualView v = axisView();
  const RenderBuffers b = renderPoints(cloudOf({{0, 0, 2}}), v, 0);
  ASSERT_EQ(b.validCount(), 1u);
  const int c = static_cast<int>(v.intr.cx), r = static_cast<int>(v.intr.cy);
  EXPECT_EQ(b.depth.at(c, r), 2.0f);
  EXPECT_EQ(b.id.at(c, r), 0u);
  expectConsistent(b);
}

TEST(RenderPoints, ZBufferKeepsNearest) {
  const VirtualView v = axisView();
  const RenderBuffers b = renderPoints(cloudOf({{0, 0, 3}, {0, 0, 1}}), v, 0);
  ASSERT_EQ(b.validCount(), 1u);
  EXPECT_EQ(b.depth.at(128, 128), 1.0f);
  EXPECT_EQ(b.id.at(128, 128), 1u);
}

TEST(RenderPoints, EqualDepthGoesToLowerIndex) {
  const VirtualView v = axisView();
  const RenderBuffers b = renderPoints(cloudOf({{0.001, 0, 2}, {0, 0, 2}, {0, 0.001, 2}}), v, 0);
  EXPECT_EQ(b.id.at(128, 128), 0u);
}

TEST(RenderPoints, BehindCameraIsCulled) {
  const RenderBuffers b = renderPoints(cloudOf({{0, 0, -1}, {0, 0, 0}}), axisView(), 1);
  EXPECT_EQ(b.validCount(), 0u);
  expectConsistent(b);
}

TEST(RenderPoints, SplatCoversWindow) {
  const RenderBuffers b = renderPoints(cloudOf({{0, 0, 2}}), axisView(), 2);
  EXPECT_EQ(b.validCount(), 25u);
  for (int dr = -2; dr <= 2; ++dr)
    for (int dc = -2; dc <= 2; ++dc) EXPECT_EQ(b.id.at(128 + dc, 128 + dr), 0u);
}

TEST(RenderPoints, ReprojectionOracle) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 5; ++trial) {
    auto pts = testing::randomPoints(3000, 10 + trial, -1.5, 1.5);
    const Vec3 eye{4 * u(rng), 4 * u(rng), 4 + u(rng)};
    VirtualView v;
    v.pose = lookAt(eye, {0, 0, 0}, {0, 0, 1});
    v.intr = defaultIntrinsics(128, 96);
    const PointCloud cloud = cloudOf(pts);
    const RenderBuffers b = renderPoints(cloud, v, 0);
    expectConsistent(b);
    std::size_t inFrustum = 0;
    for (const Vec3& p : pts) {
      Projection pr;
      int c, r;
      if (project(v, p, pr) && pixelOf(v.intr, pr.u, pr.v, c, r)) ++inFrustum;
    }
    EXPECT_LE(b.validCount(), inFrustum);
    EXPECT_GT(b.validCount(), 0u);
    for (int r = 0; r < b.height(); ++r)
      for (int c = 0; c < b.width(); ++c) {
        const std::uint32_t id = b.id.at(c, r);
        if (id == kNoPoint) continue;
        ASSERT_LT(id, pts.size());
        EXPECT_EQ(b.depth.at(c, r), static_cast<float>(v.pose.toCamera(pts[id]).z));
        Projection pr;
        int pc, prow;
        ASSERT_TRUE(project(v, pts[id], pr));
        ASSERT_TRUE(pixelOf(v.intr, pr.u, pr.v, pc, prow));
        EXPECT_EQ(pc, c);
        EXPECT_EQ(prow, r);
      }
  }
}

TEST(RenderPoints, DeterministicAndConsistentWithSplats) {
  const PointCloud cloud = cloudOf(testing::randomPoints(5000, 4, -1, 1));
  VirtualView v;
  v.pose = lookAt({3, 2, 1}, {0, 0, 0}, {0, 0, 1});
  v.intr = defaultIntrinsics();
  const RenderBuffers a = renderPoints(cloud, v, 1), b = renderPoints(cloud, v, 1);
  EXPECT_EQ(a.depth.data, b.depth.data);
  EXPECT_EQ(a.id.data, b.id.data);
  expectConsistent(a);
}

TEST(RenderMeshDepth, FrontoParallelSquare) {
  const DepthMap d = renderMeshDepth(square(10, 5), axisView());
  for (float x : d.data) EXPECT_NEAR(x, 5.0, 1e-4);
}

TEST(RenderMeshDepth, OverlapKeepsNearer) {
  TriangleMesh m = square(2, 4);
  const TriangleMesh front = square(0.5, 2);
  const auto base = static_cast<std::uint32_t>(m.vertices.size());
  for (const Vec3& p : front.vertices) m.vertices.push_back(p);
  for (auto t : front.triangles) m.triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
  const DepthMap d = renderMeshDepth(m, axisView());
  EXPECT_FLOAT_EQ(d.at(128, 128), 2.0f);
  // (1.5, 0) at depth 4 lies outside the front square.
  const double fx = axisView().intr.fx;
  EXPECT_FLOAT_EQ(d.at(128 + static_cast<int>(1.5 / 4 * fx), 128), 4.0f);
  EXPECT_TRUE(std::isinf(d.at(0, 0)));
}

TEST(RenderMeshDepth, BackFacesAreDrawn) {
  TriangleMesh m = square(10, 3);
  for (auto& t : m.triangles) std::swap(t[1], t[2]);
  const DepthMap d = renderMeshDepth(m, axisView());
  EXPECT_NEAR(d.at(10, 200), 3.0, 1e-4);
}

// Möller-Trumbore along the pixel-center ray; returns camera z or +inf.
double rayCast(const Vec3& dir, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 e1 = b - a, e2 = c - a, p = cross(dir, e2);
  const double det = dot(e1, p);
  if (std::fabs(det) < 1e-14) return INFINITY;
  const Vec3 s = -a;
  const double u = dot(s, p) / det;
  if (u < 0 || u > 1) return INFINITY;
  const Vec3 q = cross(s, e1);
  const double v = dot(dir, q) / det;
  if (v < 0 || u + v > 1) return INFINITY;
  const double t = dot(e2, q) / det;
  return t > 0 ? t * dir.z : INFINITY;
}

TEST(RenderMeshDepth, RayCastOracle) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> xy(-2, 2), z(1, 6);
  const VirtualView v = axisView(96, 64);
  for (int trial = 0; trial < 20; ++trial) {
    TriangleMesh m;
    for (int k = 0; k < 6; ++k) {
      const auto base = static_cast<std::uint32_t>(m.vertices.size());
      for (int i = 0; i < 3; ++i) m.vertices.push_back({xy(rng), xy(rng), z(rng)});
      m.triangles.push_back({base, base + 1, base + 2});
    }
    const DepthMap d = renderMeshDepth(m, v);
    std::size_t compared = 0, coverageMismatch = 0;
    for (int r = 0; r < d.height; ++r)
      for (int c = 0; c < d.width; ++c) {
        const Vec3 dir{(c - v.intr.cx) / v.intr.fx, (r - v.intr.cy) / v.intr.fy, 1.0};
        double best = INFINITY;
        for (const auto& t : m.triangles)
          best = std::min(best, rayCast(dir, m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]));
        const double got = d.at(c, r);
        if (std::isinf(best) != std::isinf(got)) {
          ++coverageMismatch;
          continue;
        }
        if (std::isinf(best)) continue;
        ++compared;
        EXPECT_LE(std::fabs(got - best), 1e-3 * best) << "pixel " << c << "," << r;
      }
    EXPECT_GT(compared, 0u);
    // Only pixel centers on triangle edges may disagree on coverage.
    EXPECT_LE(coverageMismatch, 2u);
  }
}

RenderBuffers buffersWithDepths(const std::vector<double>& depths) {
  std::vector<Vec3> pts;
  for (std::size_t i = 0; i < depths.size(); ++i) pts.push_back({0.05 * i * depths[i], 0, depths[i]});
  return renderPoints(cloudOf(pts), axisView(), 0);
}

TEST(NormalizeDepth, Endpoints) {
  const RenderBuffers b = buffersWithDepths({2, 4});
  const DepthMap n = normalizeDepth(b);
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (!b.mask.data[i]) {
      EXPECT_TRUE(std::isinf(n.data[i]));
    } else {
      EXPECT_EQ(n.data[i], b.depth.data[i] == 2.0f ? 0.0f : 1.0f);
    }
  }
}

TEST(NormalizeDepth, ConstantImageIsZero) {
  const RenderBuffers b = buffersWithDepths({3, 3, 3});
  const DepthMap n = normalizeDepth(b);
  for (std::size_t i = 0; i < n.size(); ++i)
    if (b.mask.data[i]) EXPECT_EQ(n.data[i], 0.0f);
}

TEST(NormalizeDepth, MonotoneOnRandomImage) {
  const PointCloud cloud = cloudOf(testing::randomPoints(2000, 6, -1, 1));
  VirtualView v;
  v.pose = lookAt({0, -4, 0.5}, {0, 0, 0}, {0, 0, 1});
  v.intr = defaultIntrinsics(64, 64);
  const RenderBuffers b = renderPoints(cloud, v, 0);
  const DepthMap n = normalizeDepth(b);
  float lo = INFINITY, hi = -INFINITY;
  std::vector<std::pair<float, float>> pairs;
  for (std::size_t i = 0; i < n.size(); ++i)
    if (b.mask.data[i]) {
      lo = std::min(lo, n.data[i]);
      hi = std::max(hi, n.data[i]);
      pairs.push_back({b.depth.data[i], n.data[i]});
    }
  EXPECT_EQ(lo, 0.0f);
  EXPECT_EQ(hi, 1.0f);
  std::sort(pairs.begin(), pairs.end());
  for (std::size_t i = 1; i < pairs.size(); ++i) EXPECT_LE(pairs[i - 1].second, pairs[i].second);
}

TEST(NormalizeDepth, EmptyImageFails) {
  const RenderBuffers b = renderPoints(cloudOf({{0, 0, -1}}), axisView(), 0);
  try {
    normalizeDepth(b);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("nothing rendered"), std::string::npos);
  }
}

}  // namespace
}  // namespace vvgc
