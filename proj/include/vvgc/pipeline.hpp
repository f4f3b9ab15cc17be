#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vvgc/parallel.hpp"
#include "vvgc/recon.hpp"
#include "vvgc/visibility.hpp"

namespace vvgc {

enum class ViewPattern { Spherical, Nadir, Oblique, Custom };
ViewPattern parseViewPattern(const std::string& name);
std::string viewPatternName(ViewPattern p);

struct ViewConfig {
  ViewPattern pattern = ViewPattern::Spherical;
  int nAzimuth = 8;
  int nElevation = 3;
  bool polarViews = true;  // adds two near-polar views to the spherical set
  double radiusFactor = 1.5;
  double heightAgl = 0.5;
  double overlap = 0.6;
  double tiltDeg = 45.0;
  std::string customPath;
  int width = 256;
  int height = 256;
  double vfovDeg = 60.0;
};

struct PipelineConfig {
  Estimator estimator = Estimator::Oracle;
  EstimatorConfig est;
  ReconParams recon;
  ViewConfig views;
  int splatRadius = 1;
  std::uint64_t seed = 0;
  double jitter = 0;  // opt-in Delaunay input jitter, normalized units
  unsigned threads = 1;
  bool forceUnitGamma = false;
};

// Views in the normalized frame of the cloud.
std::vector<VirtualView> generateViews(const ViewConfig& cfg, const Aabb& normalizedBox);

struct StageTimes {
  double views = 0, render = 0, visibility = 0, reconstruction = 0;  // seconds
};

struct ReconResult {
  TriangleMesh mesh;  // original coordinates
  std::vector<VirtualView> views;  // normalized frame
  std::vector<VisibilityLabels> labels;
  NormTransform transform;
  std::size_t rays = 0;
  std::size_t tets = 0;
  std::size_t finiteTets = 0;
  std::size_t graphEdges = 0;
  double flow = 0;
  StageTimes times;
  std::vector<std::string> warnings;
};

// Runs views -> render -> visibility -> Delaunay graph cut. `customViews`
// (original frame) override the generator; `gtMesh` (original frame) is
// required by the oracle estimator.
ReconResult reconstruct(const PointCloud& cloud, const PipelineConfig& cfg,
                        const std::vector<VirtualView>* customViews = nullptr,
                        const TriangleMesh* gtMesh = nullptr);

// Per-view estimation on already normalized data.
VisibilityLabels estimateView(const PointCloud& normalizedCloud, const VirtualView& view, const PipelineConfig& cfg,
                              const TriangleMesh* normalizedGt);

std::string reportJson(const ReconResult& r, const PipelineConfig& cfg);

}  // namespace vvgc
