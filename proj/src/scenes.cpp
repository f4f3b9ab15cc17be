#include "vvgc/scenes.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <random>

namespace vvgc {
namespace {

constexpr double kPi = std::numbers::pi;

std::uint32_t addVertex(TriangleMesh& m, const Vec3& p) {
  m.vertices.push_back(p);
  return static_cast<std::uint32_t>(m.vertices.size() - 1);
}

// a, b, c, d counter-clockwise seen from the side the normal points to.
void addQuad(TriangleMesh& m, std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t d) {
  m.triangles.push_back({a, b, c});
  m.triangles.push_back({a, c, d});
}

}  // namespace

void appendMesh(TriangleMesh& dst, const TriangleMesh& src) {
  const auto base = static_cast<std::uint32_t>(dst.vertices.size());
  dst.vertices.insert(dst.vertices.end(), src.vertices.begin(), src.vertices.end());
  for (const auto& t : src.triangles) dst.triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
}

TriangleMesh makeIcosphere(double radius, int subdivisions, const Vec3& center) {
  const double g = (1.0 + std::sqrt(5.0)) / 2.0;
  TriangleMesh m;
  m.vertices = {{-1, g, 0}, {1, g, 0}, {-1, -g, 0}, {1, -g, 0}, {0, -1, g}, {0, 1, g},
                {0, -1, -g}, {0, 1, -g}, {g, 0, -1}, {g, 0, 1}, {-g, 0, -1}, {-g, 0, 1}};
  for (Vec3& v : m.vertices) v = normalized(v);
  m.triangles = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                 {11, 10, 2}, {10, 7, 6}, {7, 1, 8},   {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                 {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> mid;
    auto midpoint = [&](std::uint32_t a, std::uint32_t b) {
      const auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      const std::uint32_t v = addVertex(m, normalized(m.vertices[a] + m.vertices[b]));
      mid.emplace(key, v);
      return v;
    };
    std::vector<std::array<std::uint32_t, 3>> next;
    for (const auto& t : m.triangles) {
      const std::uint32_t ab = midpoint(t[0], t[1]), bc = midpoint(t[1], t[2]), ca = midpoint(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({t[1], bc, ab});
      next.push_back({t[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    m.triangles = std::move(next);
  }
  for (auto& t : m.triangles) {
    const Vec3 &a = m.vertices[t[0]], &b = m.vertices[t[1]], &c = m.vertices[t[2]];
    if (dot(cross(b - a, c - a), a + b + c) < 0) std::swap(t[1], t[2]);
  }
  for (Vec3& v : m.vertices) v = center + v * radius;
  return m;
}

TriangleMesh makeBox(const Vec3& lo, const Vec3& hi) {
  TriangleMesh m;
  for (int i = 0; i < 8; ++i) m.vertices.push_back({(i & 1) ? hi.x : lo.x, (i & 2) ? hi.y : lo.y, (i & 4) ? hi.z : lo.z});
  // Corner index = x + 2y + 4z.
  addQuad(m, 0, 4, 6, 2);  // -x
  addQuad(m, 1, 3, 7, 5);  // +x
  addQuad(m, 0, 1, 5, 4);  // -y
  addQuad(m, 2, 6, 7, 3);  // +y
  addQuad(m, 0, 2, 3, 1);  // -z
  addQuad(m, 4, 5, 7, 6);  // +z
  return m;
}

TriangleMesh makeTorus(double majorRadius, double minorRadius, int nu, int nv) {
  TriangleMesh m;
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      const double u = 2 * kPi * i / nu, v = 2 * kPi * j / nv;
      const double r = majorRadius + minorRadius * std::cos(v);
      m.vertices.push_back({r * std::cos(u), r * std::sin(u), minorRadius * std::sin(v)});
    }
  auto id = [&](int i, int j) { return static_cast<std::uint32_t>((i % nu) * nv + (j % nv)); };
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) addQuad(m, id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
  return m;
}

TriangleMesh makeTwoPlanes(const TwoPlaneConfig& cfg) {
  TriangleMesh m;
  auto square = [&](double size, const Vec3& c) {
    const double h = 0.5 * size;
    const auto a = addVertex(m, c + Vec3{-h, -h, 0}), b = addVertex(m, c + Vec3{h, -h, 0});
    const auto d = addVertex(m, c + Vec3{h, h, 0}), e = addVertex(m, c + Vec3{-h, h, 0});
    addQuad(m, a, b, d, e);  // normal +z, toward the viewer
  };
  square(cfg.backSize, {0, 0, 0});
  square(cfg.frontSize, {cfg.frontOffset.x, cfg.frontOffset.y, cfg.separation});
  return m;
}

TwoPlaneConfig randomTwoPlaneConfig(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  TwoPlaneConfig c;
  c.backSize = 1.0;
  c.frontSize = 0.35 + 0.3 * u(rng);
  c.separation = 0.2 + 0.3 * u(rng);
  c.frontOffset = {-0.2 + 0.4 * u(rng), -0.2 + 0.4 * u(rng), 0};
  return c;
}

namespace {

TriangleMesh makeRing(double rIn, double rOut, double z0, double z1, int n) {
  TriangleMesh m;
  for (int k = 0; k < n; ++k) {
    const double a = 2 * kPi * k / n, c = std::cos(a), s = std::sin(a);
    m.vertices.push_back({rOut * c, rOut * s, z0});
    m.vertices.push_back({rOut * c, rOut * s, z1});
    m.vertices.push_back({rIn * c, rIn * s, z0});
    m.vertices.push_back({rIn * c, rIn * s, z1});
  }
  auto ob = [&](int k) { return static_cast<std::uint32_t>(4 * (k % n)); };
  auto ot = [&](int k) { return ob(k) + 1; };
  auto ib = [&](int k) { return ob(k) + 2; };
  auto it = [&](int k) { return ob(k) + 3; };
  for (int k = 0; k < n; ++k) {
    addQuad(m, ob(k), ob(k + 1), ot(k + 1), ot(k));  // outer wall
    addQuad(m, ib(k), it(k), it(k + 1), ib(k + 1));  // inner wall
    addQuad(m, ot(k), ot(k + 1), it(k + 1), it(k));  // top
    addQuad(m, ob(k), ib(k), ib(k + 1), ob(k + 1));  // bottom
  }
  return m;
}

}  // namespace

TriangleMesh makeCage(const CageConfig& cfg) {
  TriangleMesh m;
  const double rIn = cfg.radius - 0.5 * cfg.ringWidth, rOut = cfg.radius + 0.5 * cfg.ringWidth;
  const double t = cfg.ringThickness;
  appendMesh(m, makeRing(rIn, rOut, 0, t, cfg.ringSegments));
  appendMesh(m, makeRing(rIn, rOut, cfg.height - t, cfg.height, cfg.ringSegments));
  const double h = 0.5 * cfg.barWidth;
  for (int b = 0; b < cfg.bars; ++b) {
    const double a = 2 * kPi * (b + 0.5) / cfg.bars;
    const Vec3 c{cfg.radius * std::cos(a), cfg.radius * std::sin(a), 0};
    appendMesh(m, makeBox(c + Vec3{-h, -h, t}, c + Vec3{h, h, cfg.height - t}));
  }
  return m;
}

SyntheticScene makeScene(const std::string& name, std::uint64_t seed) {
  SyntheticScene s;
  s.name = name;
  if (name == "sphere") {
    s.mesh = makeIcosphere(1.0, 5);
  } else if (name == "box") {
    s.mesh = makeBox({-1, -0.6, -0.4}, {1, 0.6, 0.4});
  } else if (name == "torus") {
    s.mesh = makeTorus(1.0, 0.35, 96, 48);
  } else if (name == "two-planes") {
    s.mesh = makeTwoPlanes(seed == 0 ? TwoPlaneConfig{} : randomTwoPlaneConfig(seed));
    s.closed = false;
  } else if (name == "cage") {
    s.mesh = makeCage(CageConfig{});
  } else {
    throw Error(ErrorKind::BadInput, "unknown scene '" + name + "' (expected sphere, box, torus, two-planes or cage)");
  }
  return s;
}

}  // namespace vvgc
