#include "vvgc/bench.hpp"

#include <algorithm>
#include <cmath>

#include "vvgc/metrics.hpp"

namespace vvgc {

double BinaryScore::precision() const { return tp + fp ? double(tp) / double(tp + fp) : 0.0; }
double BinaryScore::recall() const { return tp + fn ? double(tp) / double(tp + fn) : 0.0; }
double BinaryScore::f1() const {
  const double p = precision(), r = recall();
  return p + r > 0 ? 2 * p * r / (p + r) : 0.0;
}
double BinaryScore::agreement() const { return total() ? double(tp + tn) / double(total()) : 0.0; }

BinaryScore& BinaryScore::operator+=(const BinaryScore& o) {
  tp += o.tp, fp += o.fp, fn += o.fn, tn += o.tn;
  return *this;
}

BinaryScore compareLabels(const VisibilityLabels& estimate, const VisibilityLabels& reference) {
  auto has = [](const std::vector<std::uint32_t>& v, std::uint32_t p) { return std::binary_search(v.begin(), v.end(), p); };
  BinaryScore s;
  for (std::uint32_t p : reference.visible) {
    if (has(estimate.visible, p)) ++s.tp;
    else if (has(estimate.occluded, p)) ++s.fn;
  }
  for (std::uint32_t p : reference.occluded) {
    if (has(estimate.visible, p)) ++s.fp;
    else if (has(estimate.occluded, p)) ++s.tn;
  }
  return s;
}

VisibilityLabels projectionOracle(const PointCloud& cloud, const VirtualView& view, const DepthMap& surfaceDepth,
                                  double epsilon) {
  if (!surfaceDepth.sameShape(view.intr.width, view.intr.height))
    throw Error(ErrorKind::BadInput, "image dimensions do not match");
  VisibilityLabels out;
  out.viewId = view.id;
  for (std::uint32_t i = 0; i < cloud.size(); ++i) {
    Projection p;
    int col, row;
    if (!project(view, cloud[i], p) || !pixelOf(view.intr, p.u, p.v, col, row)) continue;
    (std::fabs(p.z - double(surfaceDepth.at(col, row))) < epsilon ? out.visible : out.occluded).push_back(i);
  }
  return out;
}

SampledScene sampleNormalized(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed) {
  auto [cloud, xf] = normalizeCloud(sampleMesh(mesh, n, seed));
  SampledScene s{std::move(cloud), mesh};
  for (Vec3& v : s.gt.vertices) v = xf.invert(v);
  return s;
}

}  // namespace vvgc
