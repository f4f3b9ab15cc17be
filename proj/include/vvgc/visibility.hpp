#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vvgc/render.hpp"
#include "vvgc/viewgen.hpp"

namespace vvgc {

struct VisibilityLabels {
  int viewId = 0;
  std::vector<std::uint32_t> visible;   // sorted, unique
  std::vector<std::uint32_t> occluded;  // sorted, unique, disjoint from visible
};

struct EstimatorConfig {
  double epsilon = 0.05;       // oracle depth tolerance, normalized units
  double hprExponent = 0.0;    // R = 10^exponent * max |p|
  int coarseWindow = 7;
  double coarseTau = 0.02;
  double fineTau = 0.01;
  int completionIters = 10;
};

enum class Estimator { Oracle, Hpr, Cascade };
Estimator parseEstimator(const std::string& name);
std::string estimatorName(Estimator e);

// Per-pixel decisions to per-point labels: a point is visible when any
// pixel it won is visible.
VisibilityLabels labelsFromPixels(const RenderBuffers& buffers, const BitMask& visiblePixels, int viewId);

BitMask oraclePixels(const RenderBuffers& buffers, const DepthMap& surfaceDepth, double epsilon);
VisibilityLabels oracleVisibility(const RenderBuffers& buffers, const DepthMap& surfaceDepth, double epsilon,
                                  int viewId = 0);

// Spherical flipping followed by a convex hull, in the camera-centered frame.
VisibilityLabels hprVisibility(const PointCloud& cloud, const VirtualView& view, double hprExponent);

BitMask coarsePixels(const RenderBuffers& buffers, int window, double tau);
VisibilityLabels coarseVisibility(const RenderBuffers& buffers, int window, double tau, int viewId = 0);

// Valid pixels keep their depth; holes are filled by front-propagated 3x3
// averaging and then smoothed `iters` times.
DepthMap completeDepth(const DepthMap& sparse, const BitMask& mask, int iters);

BitMask finePixels(const RenderBuffers& buffers, const DepthMap& dense, double tau);
VisibilityLabels fineVisibility(const RenderBuffers& buffers, const DepthMap& dense, double tau, int viewId = 0);

// coarse -> remove coarse-occluded pixels -> complete depth -> fine.
struct CascadeResult {
  VisibilityLabels coarse;
  VisibilityLabels fine;
  DepthMap dense;
};
CascadeResult cascadeStages(const RenderBuffers& buffers, const EstimatorConfig& cfg, int viewId = 0);
VisibilityLabels cascadeVisibility(const RenderBuffers& buffers, const EstimatorConfig& cfg, int viewId = 0);

struct SightRay {
  Vec3 camera;
  std::uint32_t point = 0;
  int viewId = 0;
};
using SightRaySet = std::vector<SightRay>;

SightRaySet assembleRays(const std::vector<VisibilityLabels>& labels, const std::vector<VirtualView>& views);

std::string labelsToJson(const VisibilityLabels& labels);
VisibilityLabels labelsFromJson(const std::string& text);

}  // namespace vvgc
