#pragma once

#include <array>
#include <span>
#include <vector>

#include "vvgc/delaunay.hpp"
#include "vvgc/maxflow.hpp"
#include "vvgc/visibility.hpp"

namespace vvgc {

struct ReconParams {
  double lambdaAvw = 1.0;
  double lambdaQl = 1.0;
  double sigma = 0.01;     // normalized units
  double alphaMax = 1.0;
};

void validateParams(const ReconParams& p);

// alpha_max * (1 - exp(-d^2 / (2 sigma^2)))
double softVisWeight(double d, double sigma, double alphaMax);

// (1 - lambda) + lambda * max_i dot(rayDir, normal_i), clamped below at 0.
double gammaAvw(const Vec3& rayDir, std::span<const Vec3> facetNormals, double lambdaAvw);

// 1 - min(1, 2 r_in / r_circ); 1 for degenerate triangles.
double qualityWeight(const Vec3& a, const Vec3& b, const Vec3& c);

// Capacities indexed by tet; facetCap[t][i] is the directed capacity from t
// to its neighbor across the face opposite slot i.
struct TetGraph {
  std::vector<double> sourceCap;
  std::vector<double> sinkCap;
  std::vector<std::array<double, 4>> facetCap;
  double infiniteCap = 0;
  std::size_t rayCount = 0;

  FlowGraph toFlowGraph(const TetMesh& mesh) const;
  bool operator==(const TetGraph&) const = default;
};

struct GraphOptions {
  unsigned threads = 1;
  bool forceUnitGamma = false;  // the baseline weighting, independent of lambdaAvw
};

// Unit normals of the faces of `behind` that contain `point`, oriented into `behind`.
std::vector<Vec3> behindFacetNormals(const TetMesh& mesh, TetId behind, VertexId point);

TetGraph buildGraph(const TetMesh& mesh, const SightRaySet& rays, const ReconParams& params,
                    const GraphOptions& options = {});

using CutLabels = std::vector<Side>;  // Source = OUTER, Sink = INNER

struct ExtractedSurface {
  TriangleMesh mesh;
  std::vector<VertexId> sourceVertex;  // mesh vertex -> TetMesh vertex
};

// Boundary between INNER finite tets and everything else, oriented outward.
ExtractedSurface extractSurface(const TetMesh& mesh, const CutLabels& labels);

}  // namespace vvgc
