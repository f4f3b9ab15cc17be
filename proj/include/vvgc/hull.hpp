#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "vvgc/core.hpp"

namespace vvgc {

struct ConvexHull {
  std::vector<std::array<std::uint32_t, 3>> faces;  // outward oriented
  std::vector<bool> isVertex;                       // per input point
};

// Incremental 3D hull with exact orientation tests. Points on the boundary
// but not at a corner are not reported as vertices. Throws Degenerate when
// the input spans less than 3D.
ConvexHull convexHull(const std::vector<Vec3>& points);

}  // namespace vvgc
