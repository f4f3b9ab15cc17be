#pragma once

#include <cstddef>
#include <vector>

#include "vvgc/render.hpp"
#include "vvgc/visibility.hpp"

namespace vvgc {

// Confusion counts with "visible" as the positive class.
struct BinaryScore {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;

  double precision() const;
  double recall() const;
  double f1() const;
  double agreement() const;
  std::size_t total() const { return tp + fp + fn + tn; }
  BinaryScore& operator+=(const BinaryScore& o);
};

// Scores `estimate` against `reference` over the points labeled by both.
BinaryScore compareLabels(const VisibilityLabels& estimate, const VisibilityLabels& reference);

// Per-point oracle: every in-frustum point is visible iff its camera depth is
// within epsilon of the surface depth at its own pixel.
VisibilityLabels projectionOracle(const PointCloud& cloud, const VirtualView& view, const DepthMap& surfaceDepth,
                                  double epsilon);

struct SampledScene {
  PointCloud cloud;  // normalized frame
  TriangleMesh gt;   // same frame
};

// Area-uniform samples of `mesh`, with cloud and mesh moved to the cloud's normalized frame.
SampledScene sampleNormalized(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed);

}  // namespace vvgc
