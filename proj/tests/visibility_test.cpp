#include "vvgc/visibility.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "test_util.hpp"
#include "vvgc/bench.hpp"
#include "vvgc/metrics.hpp"
#include "vvgc/scenes.hpp"

namespace vvgc {
namespace {

struct Px {
  int c, r;
  float depth;
  std::uint32_t id;
};

RenderBuffers makeBuffers(int w, int h, const std::vector<Px>& pixels) {
  RenderBuffers b{DepthMap(w, h, kNoDepth), IdMap(w, h, kNoPoint), BitMask(w, h, 0)};
  for (const Px& p : pixels) {
    b.depth.at(p.c, p.r) = p.depth;
    b.id.at(p.c, p.r) = p.id;
    b.mask.at(p.c, p.r) = 1;
  }
  return b;
}

std::set<std::uint32_t> idsIn(const RenderBuffers& b) {
  std::set<std::uint32_t> s;
  for (std::uint32_t id : b.id.data)
    if (id != kNoPoint) s.insert(id);
  return s;
}

// visible and occluded are sorted, disjoint and together cover the IdMap.
void expectPartition(const VisibilityLabels& l, const RenderBuffers& b) {
  EXPECT_TRUE(std::is_sorted(l.visible.begin(), l.visible.end()));
  EXPECT_TRUE(std::is_sorted(l.occluded.begin(), l.occluded.end()));
  std::set<std::uint32_t> all(l.visible.begin(), l.visible.end());
  for (std::uint32_t p : l.occluded) EXPECT_TRUE(all.insert(p).second) << "point " << p << " in both sets";
  EXPECT_EQ(all, idsIn(b));
}

bool contains(const std::vector<std::uint32_t>& v, std::uint32_t x) { return std::binary_search(v.begin(), v.end(), x); }

VirtualView viewFrom(const Vec3& eye, const Vec3& target = {}, int size = 256) {
  VirtualView v;
  const Vec3 f = normalized(target - eye);
  v.pose = lookAt(eye, target, std::fabs(f.z) > 0.99 ? Vec3{0, 1, 0} : Vec3{0, 0, 1});
  v.intr = defaultIntrinsics(size, size);
  return v;
}

// ---- oracle ----

TEST(Oracle, EpsilonRule) {
  const RenderBuffers b = makeBuffers(3, 1, {{0, 0, 3.00f, 0}, {1, 0, 3.10f, 1}});
  DepthMap s(3, 1, kNoDepth);
  s.at(0, 0) = 3.02f;
  s.at(1, 0) = 3.00f;
  s.at(2, 0) = 1.0f;
  const VisibilityLabels l = oracleVisibility(b, s, 0.05, 4);
  EXPECT_EQ(l.viewId, 4);
  EXPECT_EQ(l.visible, std::vector<std::uint32_t>{0});
  EXPECT_EQ(l.occluded, std::vector<std::uint32_t>{1});
  expectPartition(l, b);
}

TEST(Oracle, InfiniteSurfaceDepthIsOccluded) {
  const RenderBuffers b = makeBuffers(2, 1, {{0, 0, 2.0f, 7}});
  const VisibilityLabels l = oracleVisibility(b, DepthMap(2, 1, kNoDepth), 0.05);
  EXPECT_EQ(l.occluded, std::vector<std::uint32_t>{7});
}

TEST(Oracle, VisibleAtAnyPixelWins) {
  const RenderBuffers b = makeBuffers(2, 1, {{0, 0, 2.0f, 3}, {1, 0, 2.0f, 3}});
  DepthMap s(2, 1, 2.0f);
  s.at(1, 0) = 1.0f;
  const VisibilityLabels l = oracleVisibility(b, s, 0.05);
  EXPECT_EQ(l.visible, std::vector<std::uint32_t>{3});
  EXPECT_TRUE(l.occluded.empty());
}

TEST(Oracle, DimensionMismatchFails) {
  const RenderBuffers b = makeBuffers(2, 2, {{0, 0, 1.0f, 0}});
  EXPECT_THROW(oracleVisibility(b, DepthMap(3, 2, 1.0f), 0.05), Error);
}

TEST(Oracle, SurfaceSamplesWithClearSightAreVisible) {
  const SampledScene s = sampleNormalized(makeIcosphere(1.0, 4), 4000, 3);
  for (const VirtualView& v : defaultSphericalViews(computeAabb(s.cloud))) {
    const RenderBuffers b = renderPoints(s.cloud, v, 1);
    const VisibilityLabels l = oracleVisibility(b, renderMeshDepth(s.gt, v), 0.05, v.id);
    expectPartition(l, b);
    // Away from the silhouette, points facing the camera are unoccluded on a convex surface.
    const Vec3 c = v.pose.center(), o = computeAabb(s.cloud).center();
    for (std::uint32_t p : l.occluded)
      EXPECT_LT(dot(normalized(s.cloud[p] - o), normalized(c - s.cloud[p])), 0.3) << "view " << v.id;
  }
}

// ---- HPR ----

std::vector<Vec3> patch(double half, double z, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-half, half);
  std::vector<Vec3> pts;
  for (int k = 0; k < n; ++k) pts.push_back({u(rng), u(rng), z});
  return pts;
}

TEST(Hpr, FrontFacingPatchIsVisible) {
  const PointCloud cloud = testing::cloudOf(patch(0.5, 0, 800, 1));
  const VisibilityLabels l = hprVisibility(cloud, viewFrom({0, 0, 3}), EstimatorConfig{}.hprExponent);
  EXPECT_EQ(l.visible.size(), cloud.size());
  EXPECT_TRUE(l.occluded.empty());
}

TEST(Hpr, CoveredPatchIsOccluded) {
  std::vector<Vec3> pts = patch(0.6, 0.3, 1500, 2);
  const auto nearCount = pts.size();
  for (const Vec3& p : patch(0.3, 0, 500, 3)) pts.push_back(p);
  const VisibilityLabels l = hprVisibility(testing::cloudOf(pts), viewFrom({0, 0, 3}), EstimatorConfig{}.hprExponent);
  std::size_t occ = 0;
  for (std::size_t k = nearCount; k < pts.size(); ++k) occ += contains(l.occluded, static_cast<std::uint32_t>(k));
  EXPECT_GE(occ, 0.9 * (pts.size() - nearCount));
}

TEST(Hpr, SphereAgreesWithOracle) {
  const SampledScene s = sampleNormalized(makeIcosphere(1.0, 4), 5000, 4);
  BinaryScore total;
  for (const VirtualView& v : defaultSphericalViews(computeAabb(s.cloud))) {
    const VisibilityLabels est = hprVisibility(s.cloud, v, EstimatorConfig{}.hprExponent);
    total += compareLabels(est, projectionOracle(s.cloud, v, renderMeshDepth(s.gt, v), 0.05));
  }
  EXPECT_GE(total.agreement(), 0.9);
}

TEST(Hpr, LabelsExactlyTheFrustumPoints) {
  const PointCloud cloud = testing::cloudOf(testing::randomPoints(400, 9, -1, 1));
  const VirtualView v = viewFrom({0.3, 0.2, 1.6}, {0, 0, 0}, 64);
  const VisibilityLabels l = hprVisibility(cloud, v, EstimatorConfig{}.hprExponent);
  std::set<std::uint32_t> labeled(l.visible.begin(), l.visible.end());
  labeled.insert(l.occluded.begin(), l.occluded.end());
  EXPECT_EQ(labeled.size(), l.visible.size() + l.occluded.size());
  for (std::uint32_t i = 0; i < cloud.size(); ++i) {
    Projection p;
    int c, r;
    const bool in = project(v, cloud[i], p) && pixelOf(v.intr, p.u, p.v, c, r);
    EXPECT_EQ(labeled.count(i) == 1, in);
  }
}

TEST(Hpr, TooFewPointsFails) {
  const PointCloud cloud = testing::cloudOf({{0, 0, 0}, {0.1, 0, 0}, {0, 0.1, 0}});
  try {
    hprVisibility(cloud, viewFrom({0, 0, 3}), EstimatorConfig{}.hprExponent);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("insufficient points"), std::string::npos);
  }
}

// ---- coarse ----

TEST(Coarse, IsolatedPixelIsVisible) {
  const RenderBuffers b = makeBuffers(9, 9, {{4, 4, 5.0f, 0}});
  EXPECT_EQ(coarseVisibility(b, 3, 0.1).visible, std::vector<std::uint32_t>{0});
}

TEST(Coarse, DeeperNeighborIsOccluded) {
  const RenderBuffers b = makeBuffers(9, 9, {{4, 4, 5.0f, 0}, {5, 4, 1.0f, 1}});
  const VisibilityLabels l = coarseVisibility(b, 3, 0.1);
  EXPECT_EQ(l.visible, std::vector<std::uint32_t>{1});
  EXPECT_EQ(l.occluded, std::vector<std::uint32_t>{0});
  // Outside the window the nearer pixel no longer matters.
  const RenderBuffers far = makeBuffers(9, 9, {{4, 4, 5.0f, 0}, {7, 4, 1.0f, 1}});
  EXPECT_EQ(coarseVisibility(far, 3, 0.1).visible.size(), 2u);
}

TEST(Coarse, BadParametersFail) {
  const RenderBuffers b = makeBuffers(4, 4, {{1, 1, 1.0f, 0}});
  EXPECT_THROW(coarseVisibility(b, 4, 0.1), Error);
  EXPECT_THROW(coarseVisibility(b, 1, 0.1), Error);
  EXPECT_THROW(coarseVisibility(b, 3, 0.0), Error);
}

TEST(Coarse, SphereBehindPlaneRecall) {
  TriangleMesh gt = makeBox({-1, -1, 0}, {1, 1, 0.02});
  appendMesh(gt, makeIcosphere(0.5, 3, {0.9, 0, -0.8}));
  const SampledScene s = sampleNormalized(gt, 20000, 5);
  const Aabb box = computeAabb(s.cloud);
  const Vec3 c = box.center();
  BinaryScore score;
  for (const Vec3& eye : {c + Vec3{0, 0, 1.2}, c + Vec3{0.4, 0.2, 1.0}, c + Vec3{-0.3, 0.3, 1.1}}) {
    const VirtualView v = viewFrom(eye, c);
    const RenderBuffers b = renderPoints(s.cloud, v, 1);
    const VisibilityLabels ref = oracleVisibility(b, renderMeshDepth(s.gt, v), 0.05);
    const VisibilityLabels est = coarseVisibility(b, 7, 0.02);
    expectPartition(est, b);
    score += compareLabels(est, ref);
  }
  EXPECT_GT(score.fn + score.tn, 0u);
  EXPECT_GE(score.recall(), 0.9);
}

// ---- completion ----

TEST(Completion, DenseInputUnchanged) {
  DepthMap d(6, 5, 0.0f);
  for (std::size_t i = 0; i < d.size(); ++i) d.data[i] = 1.0f + 0.1f * static_cast<float>(i);
  const DepthMap out = completeDepth(d, BitMask(6, 5, 1), 10);
  EXPECT_EQ(out.data, d.data);
}

TEST(Completion, SinglePixelFillsEverything) {
  DepthMap d(16, 12, kNoDepth);
  BitMask m(16, 12, 0);
  d.at(3, 9) = 7.0f;
  m.at(3, 9) = 1;
  const DepthMap out = completeDepth(d, m, 10);
  for (float x : out.data) EXPECT_NEAR(x, 7.0, 1e-5);
}

TEST(Completion, HalfPlaneFixedPoint) {
  DepthMap d(20, 20, kNoDepth);
  BitMask m(20, 20, 0);
  for (int r = 0; r < 20; ++r)
    for (int c = 0; c < 10; ++c) {
      d.at(c, r) = 3.0f;
      m.at(c, r) = 1;
    }
  const DepthMap out = completeDepth(d, m, 25);
  for (float x : out.data) EXPECT_NEAR(x, 3.0, 1e-5);
}

TEST(Completion, KeepsValidPixelsExactly) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<float> u(1, 5);
  DepthMap d(32, 24, kNoDepth);
  BitMask m(32, 24, 0);
  for (std::size_t i = 0; i < d.size(); ++i)
    if (rng() % 5 == 0) {
      d.data[i] = u(rng);
      m.data[i] = 1;
    }
  const DepthMap out = completeDepth(d, m, 10);
  for (std::size_t i = 0; i < d.size(); ++i) {
    EXPECT_TRUE(std::isfinite(out.data[i]));
    if (m.data[i]) EXPECT_EQ(out.data[i], d.data[i]);
    EXPECT_GE(out.data[i], 1.0f);
    EXPECT_LE(out.data[i], 5.0f);
  }
}

TEST(Completion, EmptyMaskFails) {
  try {
    completeDepth(DepthMap(4, 4, kNoDepth), BitMask(4, 4, 0), 3);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("nothing rendered"), std::string::npos);
  }
}

// ---- fine ----

TEST(Fine, Examples) {
  const RenderBuffers b = makeBuffers(2, 1, {{0, 0, 2.0f, 0}, {1, 0, 2.1f, 1}});
  const DepthMap dense(2, 1, 2.0f);
  const VisibilityLabels l = fineVisibility(b, dense, 0.01);
  EXPECT_EQ(l.visible, std::vector<std::uint32_t>{0});
  EXPECT_EQ(l.occluded, std::vector<std::uint32_t>{1});
  EXPECT_THROW(fineVisibility(b, DepthMap(3, 1, 2.0f), 0.01), Error);
}

// ---- tau monotonicity ----

TEST(Monotonicity, LoweringTauNeverAddsVisibility) {
  const SampledScene s = sampleNormalized(makeTwoPlanes(randomTwoPlaneConfig(3)), 8000, 7);
  const Aabb box = computeAabb(s.cloud);
  const VirtualView v = viewFrom(box.center() + Vec3{0.3, -0.2, 1.0}, box.center());
  const RenderBuffers b = renderPoints(s.cloud, v, 1);
  EstimatorConfig cfg;
  const DepthMap dense = cascadeStages(b, cfg).dense;
  auto visibleSet = [](const VisibilityLabels& l) { return std::set<std::uint32_t>(l.visible.begin(), l.visible.end()); };
  std::set<std::uint32_t> prevCoarse, prevFine;
  bool first = true;
  for (double tau : {0.2, 0.05, 0.02, 0.01, 0.005, 0.001}) {
    const auto coarse = visibleSet(coarseVisibility(b, 7, tau));
    const auto fine = visibleSet(fineVisibility(b, dense, tau));
    if (!first) {
      EXPECT_TRUE(std::includes(prevCoarse.begin(), prevCoarse.end(), coarse.begin(), coarse.end()));
      EXPECT_TRUE(std::includes(prevFine.begin(), prevFine.end(), fine.begin(), fine.end()));
    }
    prevCoarse = coarse;
    prevFine = fine;
    first = false;
  }
}

// ---- cascade ----

TEST(Cascade, SinglePlaneAllVisible) {
  const SampledScene s = sampleNormalized(makeBox({-1, -1, 0}, {1, 1, 0.001}), 6000, 8);
  const Aabb box = computeAabb(s.cloud);
  const VirtualView v = viewFrom(box.center() + Vec3{0.1, 0.1, 1.0}, box.center());
  const RenderBuffers b = renderPoints(s.cloud, v, 1);
  const VisibilityLabels l = cascadeVisibility(b, EstimatorConfig{});
  expectPartition(l, b);
  EXPECT_EQ(l.visible.size(), idsIn(b).size());
}

TEST(Cascade, FineRefinesCoarseOnTwoPlanes) {
  const SampledScene s = sampleNormalized(makeTwoPlanes(TwoPlaneConfig{}), 10000, 9);
  BinaryScore coarse, fine;
  for (const VirtualView& v : defaultSphericalViews(computeAabb(s.cloud))) {
    const RenderBuffers b = renderPoints(s.cloud, v, 1);
    if (b.validCount() == 0) continue;
    const VisibilityLabels ref = oracleVisibility(b, renderMeshDepth(s.gt, v), 0.05, v.id);
    const CascadeResult r = cascadeStages(b, EstimatorConfig{}, v.id);
    expectPartition(r.fine, b);
    // Fine only adds visibility to the coarse result.
    EXPECT_TRUE(std::includes(r.fine.visible.begin(), r.fine.visible.end(), r.coarse.visible.begin(), r.coarse.visible.end()));
    coarse += compareLabels(r.coarse, ref);
    fine += compareLabels(r.fine, ref);
  }
  EXPECT_GE(fine.f1(), 0.8);
  EXPECT_GE(fine.f1(), coarse.f1());
}

TEST(Cascade, EmptyImageFails) {
  try {
    cascadeVisibility(makeBuffers(8, 8, {}), EstimatorConfig{});
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("nothing rendered"), std::string::npos);
  }
}

// ---- rays and serialization ----

TEST(AssembleRays, Counting) {
  std::vector<VirtualView> views{viewFrom({0, 0, 3}), viewFrom({3, 0, 0})};
  views[1].id = 1;
  std::vector<VisibilityLabels> labels{{0, {0, 1, 2}, {5}}, {1, {3, 4, 5}, {}}};
  EXPECT_EQ(assembleRays(labels, views).size(), 6u);

  labels[1].visible = {0, 1};
  const SightRaySet rays = assembleRays(labels, views);
  ASSERT_EQ(rays.size(), 5u);
  std::set<std::pair<double, double>> centers;
  for (const SightRay& r : rays)
    if (r.point == 0) centers.insert({r.camera.x, r.camera.z});
  EXPECT_EQ(centers.size(), 2u);

  labels.push_back(labels[0]);
  EXPECT_EQ(assembleRays(labels, views).size(), 5u);

  EXPECT_TRUE(assembleRays({{0, {}, {0, 1}}}, views).empty());
  EXPECT_THROW(assembleRays({{9, {0}, {}}}, views), Error);
}

TEST(LabelsJson, RoundTrip) {
  const VisibilityLabels l{12, {1, 4, 9}, {0, 2}};
  const VisibilityLabels r = labelsFromJson(labelsToJson(l));
  EXPECT_EQ(r.viewId, 12);
  EXPECT_EQ(r.visible, l.visible);
  EXPECT_EQ(r.occluded, l.occluded);
  EXPECT_THROW(labelsFromJson("{\"view_id\":0,\"visible\":[1],\"occluded\":[1]}"), Error);
  EXPECT_THROW(labelsFromJson("not json"), Error);
}

}  // namespace
}  // namespace vvgc
