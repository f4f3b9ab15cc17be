#include "vvgc/viewgen.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <set>

#include "vvgc/io.hpp"

namespace vvgc {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

void expectRotation(const Mat3& r, double tol = 1e-9) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(dot(r.row(i), r.row(j)), i == j ? 1.0 : 0.0, tol);
  EXPECT_NEAR(r.determinant(), 1.0, tol);
}

double maxDiff(const Vec3& a, const Vec3& b) {
  return std::max({std::fabs(a.x - b.x), std::fabs(a.y - b.y), std::fabs(a.z - b.z)});
}

TEST(LookAt, AxisAligned) {
  const RigidPose p = lookAt({0, 0, -2}, {0, 0, 0}, {0, 1, 0});
  EXPECT_LE(maxDiff(p.forward(), {0, 0, 1}), 1e-15);
  EXPECT_LE(maxDiff(p.toCamera({0, 0, 0}), {0, 0, 2}), 1e-15);
}

TEST(LookAt, CenterRoundTrip) {
  const RigidPose p = lookAt({2, 0, 0}, {0, 0, 0}, {0, 0, 1});
  EXPECT_LE(maxDiff(p.center(), {2, 0, 0}), 1e-12);
  // Up maps to negative image y.
  EXPECT_LT(p.rotation.row(1).z, 0);
}

TEST(LookAt, RandomInputsAreRotations) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int k = 0; k < 200; ++k) {
    const Vec3 eye{u(rng), u(rng), u(rng)}, target{u(rng), u(rng), u(rng)}, up{u(rng), u(rng), u(rng)};
    const RigidPose p = lookAt(eye, target, up);
    expectRotation(p.rotation);
    EXPECT_LE(maxDiff(p.forward(), normalized(target - eye)), 1e-12);
    EXPECT_LE(maxDiff(p.center(), eye), 1e-12);
  }
}

TEST(LookAt, Degenerate) {
  EXPECT_THROW(lookAt({1, 1, 1}, {1, 1, 1}, {0, 0, 1}), Error);
  EXPECT_THROW(lookAt({0, 0, 0}, {0, 0, 1}, {0, 0, 3}), Error);
}

TEST(Spherical, AimingAndCount) {
  const Aabb box{{-1, -2, 0}, {3, 1, 1}};
  const auto views = sampleSpherical(box, 4, 2, 1.5);
  ASSERT_EQ(views.size(), 8u);
  std::set<std::tuple<double, double, double>> dirs;
  for (const auto& v : views) {
    expectRotation(v.pose.rotation);
    EXPECT_LE(maxDiff(v.pose.forward(), normalized(box.center() - v.pose.center())), 1e-9);
    dirs.insert({v.pose.forward().x, v.pose.forward().y, v.pose.forward().z});
  }
  EXPECT_EQ(dirs.size(), views.size());
}

TEST(Spherical, SingleViewOnEquator) {
  const auto views = sampleSpherical({{0, 0, 0}, {1, 1, 1}}, 1, 1, 1.0);
  ASSERT_EQ(views.size(), 1u);
  EXPECT_NEAR(views[0].pose.center().z, 0.5, 1e-12);
}

TEST(Spherical, RadiusAndElevationRange) {
  const Aabb box{{0, 0, 0}, {1, 1, 1}};
  for (const auto& v : sampleSpherical(box, 7, 5, 2.0)) {
    const Vec3 d = v.pose.center() - box.center();
    EXPECT_NEAR(norm(d), 2.0 * std::sqrt(3.0), 1e-9);
    EXPECT_FALSE(box.contains(v.pose.center()));
    EXPECT_LT(std::fabs(std::asin(d.z / norm(d))), 75.0 * kDeg + 1e-12);
  }
  EXPECT_THROW(sampleSpherical(box, 0, 1, 2.0), Error);
  EXPECT_THROW(sampleSpherical(box, 1, 1, 0.5), Error);
}

TEST(Spherical, DefaultSetHas26Views) {
  const auto views = defaultSphericalViews({{-1, -1, -1}, {1, 1, 1}});
  ASSERT_EQ(views.size(), 26u);
  for (std::size_t k = 0; k < views.size(); ++k) {
    EXPECT_EQ(views[k].id, static_cast<int>(k));
    expectRotation(views[k].pose.rotation);
    EXPECT_LE(norm(views[k].pose.toCamera({0, 0, 0}) - Vec3{0, 0, norm(views[k].pose.center())}), 1e-9);
  }
}

Intrinsics squareIntrinsics() { return {256, 256, 128, 128, 256, 256}; }  // footprint equals height

TEST(Nadir, GridStepAndCoverage) {
  const Aabb box{{0, 0, 0}, {10, 10, 0}};
  const auto views = sampleGridNadir(box, 5, 0.5, squareIntrinsics());
  EXPECT_GE(views.size(), 25u);
  std::set<double> xs;
  for (const auto& v : views) {
    EXPECT_LE(maxDiff(v.pose.forward(), {0, 0, -1}), 1e-15);
    EXPECT_NEAR(v.pose.center().z, 5, 1e-12);
    xs.insert(v.pose.center().x);
  }
  std::vector<double> sx(xs.begin(), xs.end());
  for (std::size_t k = 1; k < sx.size(); ++k) EXPECT_NEAR(sx[k] - sx[k - 1], 2.5, 1e-12);
  // Footprint union covers the rectangle.
  EXPECT_LE(sx.front() - 2.5, box.min.x);
  EXPECT_GE(sx.back() + 2.5, box.max.x);
}

TEST(Nadir, ZeroOverlapStepIsFootprint) {
  const auto views = sampleGridNadir({{0, 0, 0}, {12, 0.1, 0}}, 4, 0.0, squareIntrinsics());
  ASSERT_GE(views.size(), 2u);
  EXPECT_NEAR(views[1].pose.center().x - views[0].pose.center().x, 4.0, 1e-12);
  EXPECT_THROW(sampleGridNadir({{0, 0, 0}, {1, 1, 0}}, 0, 0.5), Error);
  EXPECT_THROW(sampleGridNadir({{0, 0, 0}, {1, 1, 0}}, 1, 0.99), Error);
}

TEST(Oblique, CountsAndTilt) {
  const Aabb box{{0, 0, 0}, {10, 6, 2}};
  const auto nadir = sampleGridNadir(box, 3, 0.3);
  const auto oblique = sampleGridOblique(box, 3, 0.3, 45);
  EXPECT_EQ(oblique.size(), 5 * nadir.size());
  for (const auto& v : oblique) {
    expectRotation(v.pose.rotation);
    const double angle = std::acos(std::clamp(dot(v.pose.forward(), {0, 0, -1}), -1.0, 1.0)) / kDeg;
    EXPECT_TRUE(std::fabs(angle) < 1e-6 || std::fabs(angle - 45) < 1e-6) << angle;
  }
  EXPECT_THROW(sampleGridOblique(box, 3, 0.3, 90), Error);
}

TEST(Oblique, FacadeReceivesObliqueView) {
  // Wall in the plane x = 0 facing +x.
  const Vec3 wallNormal{1, 0, 0};
  const auto views = sampleGridOblique({{0, -2, 0}, {4, 2, 3}}, 2, 0.3, 45);
  double best = 180;
  for (const auto& v : views) best = std::min(best, std::acos(dot(-v.pose.forward(), wallNormal)) / kDeg);
  EXPECT_LT(best, 60);
}

TEST(CustomViews, EyeTargetAndRotationForms) {
  const std::string text = R"({"views":[
    {"id":5,"eye":[0,0,-3],"target":[0,0,0],"up":[0,1,0]},
    {"rotation":[1,0,0, 0,1,0, 0,0,1],"translation":[0,0,4],"fx":100,"fy":100,"cx":50,"cy":40,"width":100,"height":80}]})";
  const auto views = parseViews(text);
  ASSERT_EQ(views.size(), 2u);
  EXPECT_EQ(views[0].id, 0);
  EXPECT_EQ(views[1].id, 1);
  EXPECT_EQ(views[0].intr.width, 256);
  EXPECT_EQ(views[1].intr.cy, 40);
  EXPECT_LE(maxDiff(views[1].pose.center(), {0, 0, -4}), 1e-15);
}

TEST(CustomViews, Guards) {
  EXPECT_THROW(parseViews(R"({"views":[]})"), Error);
  try {
    parseViews(R"({"views":[]})");
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "no views");
  }
  EXPECT_THROW(parseViews("not json"), Error);
  EXPECT_THROW(parseViews(R"({"views":[{"rotation":[2,0,0,0,1,0,0,0,1],"translation":[0,0,0]}]})"), Error);
  EXPECT_THROW(parseViews(R"({"views":[{"eye":[0,0,0],"target":[0,0,1],"up":[0,1,0],"fx":-1}]})"), Error);
  EXPECT_THROW(loadCustomViews("/nonexistent/views.json"), Error);
}

TEST(CustomViews, SlightlyOffRotationIsRepaired) {
  const auto views = parseViews(R"({"views":[{"rotation":[1.0004,0,0, 0,0.9997,0.0002, 0,0,1],"translation":[0,0,1]}]})");
  expectRotation(views[0].pose.rotation, 1e-12);
}

TEST(CustomViews, RoundTrip) {
  const auto views = defaultSphericalViews({{-1, -2, -3}, {4, 5, 6}});
  const auto path = (std::filesystem::temp_directory_path() / "vvgc_views_roundtrip.json").string();
  saveViews(path, views);
  const auto back = loadCustomViews(path);
  ASSERT_EQ(back.size(), views.size());
  for (std::size_t k = 0; k < views.size(); ++k) {
    for (int i = 0; i < 9; ++i) EXPECT_NEAR(back[k].pose.rotation.m[i], views[k].pose.rotation.m[i], 1e-9);
    EXPECT_LE(maxDiff(back[k].pose.translation, views[k].pose.translation), 1e-9);
    EXPECT_EQ(back[k].intr.fx, views[k].intr.fx);
  }
  std::filesystem::remove(path);
}

TEST(ViewToNormalized, CameraCoordinatesScale) {
  const NormTransform xf{{3, -1, 2}, 4.0};
  const VirtualView v{lookAt({10, 3, 2}, {3, -1, 2}, {0, 0, 1}), defaultIntrinsics(), 0};
  const VirtualView n = viewToNormalized(v, xf);
  const Vec3 world{5, 1, 3};
  EXPECT_LE(maxDiff(n.pose.toCamera(xf.invert(world)) * xf.scale, v.pose.toCamera(world)), 1e-12);
}

}  // namespace
}  // namespace vvgc
