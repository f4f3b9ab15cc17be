#pragma once

#include <cstdint>
#include <string>

#include "vvgc/core.hpp"

namespace vvgc {

TriangleMesh makeIcosphere(double radius, int subdivisions, const Vec3& center = {});
TriangleMesh makeBox(const Vec3& min, const Vec3& max);
TriangleMesh makeTorus(double majorRadius, double minorRadius, int nu, int nv);

// Two parallel squares facing +z: a small front square occluding part of a
// larger back square.
struct TwoPlaneConfig {
  double backSize = 1.0;
  double frontSize = 0.5;
  double separation = 0.3;
  Vec3 frontOffset;  // xy shift of the front square
};
TriangleMesh makeTwoPlanes(const TwoPlaneConfig& cfg);
TwoPlaneConfig randomTwoPlaneConfig(std::uint64_t seed);

// Thin vertical bars on a circle between two flat rings.
struct CageConfig {
  int bars = 12;
  double radius = 1.0;
  double height = 2.0;
  double barWidth = 0.1;
  double ringWidth = 0.1;
  double ringThickness = 0.1;
  int ringSegments = 24;
};
TriangleMesh makeCage(const CageConfig& cfg);

void appendMesh(TriangleMesh& dst, const TriangleMesh& src);

struct SyntheticScene {
  std::string name;
  TriangleMesh mesh;
  bool closed = true;
};

// sphere | box | torus | two-planes | cage
SyntheticScene makeScene(const std::string& name, std::uint64_t seed = 0);

}  // namespace vvgc
