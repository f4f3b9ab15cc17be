#include "vvgc/visibility.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "json.hpp"
#include "vvgc/hull.hpp"

namespace vvgc {

using nlohmann::json;

Estimator parseEstimator(const std::string& name) {
  if (name == "oracle") return Estimator::Oracle;
  if (name == "hpr") return Estimator::Hpr;
  if (name == "cascade") return Estimator::Cascade;
  throw Error(ErrorKind::BadInput, "unknown estimator '" + name + "' (expected oracle, hpr or cascade)");
}

std::string estimatorName(Estimator e) {
  switch (e) {
    case Estimator::Oracle: return "oracle";
    case Estimator::Hpr: return "hpr";
    case Estimator::Cascade: return "cascade";
  }
  return "";
}

namespace {

void requireShape(const RenderBuffers& b, int w, int h) {
  if (b.width() != w || b.height() != h) throw Error(ErrorKind::BadInput, "image dimensions do not match");
}

void requireRendered(const RenderBuffers& b) {
  if (b.validCount() == 0) throw Error(ErrorKind::BadInput, "nothing rendered");
}

std::vector<std::uint32_t> sortedUnique(std::vector<std::uint32_t> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

VisibilityLabels labelsFromPixels(const RenderBuffers& buffers, const BitMask& visiblePixels, int viewId) {
  std::vector<std::uint32_t> seen, vis;
  for (std::size_t i = 0; i < buffers.id.size(); ++i) {
    if (!buffers.mask.data[i]) continue;
    seen.push_back(buffers.id.data[i]);
    if (visiblePixels.data[i]) vis.push_back(buffers.id.data[i]);
  }
  VisibilityLabels out;
  out.viewId = viewId;
  out.visible = sortedUnique(std::move(vis));
  seen = sortedUnique(std::move(seen));
  std::set_difference(seen.begin(), seen.end(), out.visible.begin(), out.visible.end(),
                      std::back_inserter(out.occluded));
  return out;
}

BitMask oraclePixels(const RenderBuffers& buffers, const DepthMap& surfaceDepth, double epsilon) {
  requireShape(buffers, surfaceDepth.width, surfaceDepth.height);
  BitMask vis(buffers.width(), buffers.height(), 0);
  for (std::size_t i = 0; i < vis.size(); ++i)
    if (buffers.mask.data[i])
      vis.data[i] = std::fabs(double(buffers.depth.data[i]) - double(surfaceDepth.data[i])) < epsilon;
  return vis;
}

VisibilityLabels oracleVisibility(const RenderBuffers& buffers, const DepthMap& surfaceDepth, double epsilon, int viewId) {
  if (!(epsilon > 0)) throw Error(ErrorKind::BadInput, "epsilon must be positive");
  return labelsFromPixels(buffers, oraclePixels(buffers, surfaceDepth, epsilon), viewId);
}

VisibilityLabels hprVisibility(const PointCloud& cloud, const VirtualView& view, double hprExponent) {
  const Vec3 c = view.pose.center();
  std::vector<std::uint32_t> ids;
  std::vector<Vec3> local;
  for (std::uint32_t i = 0; i < cloud.size(); ++i) {
    Projection p;
    int col, row;
    if (!project(view, cloud[i], p) || !pixelOf(view.intr, p.u, p.v, col, row)) continue;
    ids.push_back(i);
    local.push_back(cloud[i] - c);
  }
  if (local.size() < 4) throw Error(ErrorKind::Degenerate, "insufficient points for hidden point removal");
  double maxNorm = 0;
  for (const Vec3& p : local) maxNorm = std::max(maxNorm, norm(p));
  const double radius = std::pow(10.0, hprExponent) * maxNorm;
  for (Vec3& p : local) {
    const double n = norm(p);
    p = p + p * (2.0 * (radius - n) / n);
  }
  local.push_back({0, 0, 0});
  ConvexHull hull;
  try {
    hull = convexHull(local);
  } catch (const Error&) {
    throw Error(ErrorKind::Degenerate, "insufficient points for hidden point removal");
  }
  VisibilityLabels out;
  out.viewId = view.id;
  for (std::size_t k = 0; k < ids.size(); ++k) (hull.isVertex[k] ? out.visible : out.occluded).push_back(ids[k]);
  out.visible = sortedUnique(std::move(out.visible));
  out.occluded = sortedUnique(std::move(out.occluded));
  // A repeated position keeps one hull corner; label the copies alike.
  std::vector<std::uint32_t> occ;
  std::set_difference(out.occluded.begin(), out.occluded.end(), out.visible.begin(), out.visible.end(),
                      std::back_inserter(occ));
  out.occluded = std::move(occ);
  return out;
}

BitMask coarsePixels(const RenderBuffers& buffers, int window, double tau) {
  if (window < 3 || window % 2 == 0) throw Error(ErrorKind::BadInput, "coarse window must be odd and at least 3");
  if (!(tau > 0)) throw Error(ErrorKind::BadInput, "coarse tau must be positive");
  const int w = buffers.width(), h = buffers.height(), r = window / 2;
  // Separable window minimum; invalid pixels hold +inf and never win.
  DepthMap rowMin(w, h, kNoDepth), boxMin(w, h, kNoDepth);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      float m = kNoDepth;
      for (int k = std::max(0, x - r); k <= std::min(w - 1, x + r); ++k) m = std::min(m, buffers.depth.at(k, y));
      rowMin.at(x, y) = m;
    }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      float m = kNoDepth;
      for (int k = std::max(0, y - r); k <= std::min(h - 1, y + r); ++k) m = std::min(m, rowMin.at(x, k));
      boxMin.at(x, y) = m;
    }
  BitMask vis(w, h, 0);
  for (std::size_t i = 0; i < vis.size(); ++i)
    if (buffers.mask.data[i]) vis.data[i] = !(double(buffers.depth.data[i]) > double(boxMin.data[i]) + tau);
  return vis;
}

VisibilityLabels coarseVisibility(const RenderBuffers& buffers, int window, double tau, int viewId) {
  return labelsFromPixels(buffers, coarsePixels(buffers, window, tau), viewId);
}

DepthMap completeDepth(const DepthMap& sparse, const BitMask& mask, int iters) {
  const int w = sparse.width, h = sparse.height;
  if (!mask.sameShape(w, h)) throw Error(ErrorKind::BadInput, "image dimensions do not match");
  if (iters < 0) throw Error(ErrorKind::BadInput, "completion iterations must be non-negative");
  // Multi-source BFS layers reproduce pass-by-pass front propagation: a hole
  // pixel in layer k averages its neighbors from layers < k.
  std::vector<int> layer(sparse.size(), -1);
  std::vector<std::size_t> frontier;
  for (std::size_t i = 0; i < sparse.size(); ++i)
    if (mask.data[i]) {
      layer[i] = 0;
      frontier.push_back(i);
    }
  if (frontier.empty()) throw Error(ErrorKind::BadInput, "nothing rendered");

  std::vector<double> value(sparse.size(), 0.0);
  for (std::size_t i : frontier) value[i] = sparse.data[i];
  std::vector<std::size_t> holes;
  for (int k = 1; !frontier.empty(); ++k) {
    std::vector<std::size_t> next;
    for (std::size_t i : frontier) {
      const int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = x + dx, ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const std::size_t j = static_cast<std::size_t>(ny) * w + nx;
          if (layer[j] < 0) {
            layer[j] = k;
            next.push_back(j);
          }
        }
    }
    std::sort(next.begin(), next.end());
    for (std::size_t j : next) {
      const int x = static_cast<int>(j % w), y = static_cast<int>(j / w);
      double sum = 0;
      int n = 0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = x + dx, ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const std::size_t q = static_cast<std::size_t>(ny) * w + nx;
          if (layer[q] >= 0 && layer[q] < k) sum += value[q], ++n;
        }
      value[j] = sum / n;
      holes.push_back(j);
    }
    frontier = std::move(next);
  }

  std::vector<double> tmp;
  for (int it = 0; it < iters; ++it) {
    tmp = value;
    for (std::size_t j : holes) {
      const int x = static_cast<int>(j % w), y = static_cast<int>(j / w);
      double sum = 0;
      int n = 0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = x + dx, ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          sum += value[static_cast<std::size_t>(ny) * w + nx], ++n;
        }
      tmp[j] = sum / n;
    }
    value.swap(tmp);
  }

  DepthMap out(w, h, kNoDepth);
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] = mask.data[i] ? sparse.data[i] : static_cast<float>(value[i]);
  return out;
}

BitMask finePixels(const RenderBuffers& buffers, const DepthMap& dense, double tau) {
  requireShape(buffers, dense.width, dense.height);
  if (!(tau > 0)) throw Error(ErrorKind::BadInput, "fine tau must be positive");
  BitMask vis(buffers.width(), buffers.height(), 0);
  for (std::size_t i = 0; i < vis.size(); ++i)
    if (buffers.mask.data[i]) vis.data[i] = double(buffers.depth.data[i]) - double(dense.data[i]) < tau;
  return vis;
}

VisibilityLabels fineVisibility(const RenderBuffers& buffers, const DepthMap& dense, double tau, int viewId) {
  return labelsFromPixels(buffers, finePixels(buffers, dense, tau), viewId);
}

CascadeResult cascadeStages(const RenderBuffers& buffers, const EstimatorConfig& cfg, int viewId) {
  requireRendered(buffers);
  const BitMask coarse = coarsePixels(buffers, cfg.coarseWindow, cfg.coarseTau);
  DepthMap filtered = buffers.depth;
  for (std::size_t i = 0; i < filtered.size(); ++i)
    if (!coarse.data[i]) filtered.data[i] = kNoDepth;
  CascadeResult r;
  r.dense = completeDepth(filtered, coarse, cfg.completionIters);
  r.coarse = labelsFromPixels(buffers, coarse, viewId);
  r.fine = fineVisibility(buffers, r.dense, cfg.fineTau, viewId);
  return r;
}

VisibilityLabels cascadeVisibility(const RenderBuffers& buffers, const EstimatorConfig& cfg, int viewId) {
  return cascadeStages(buffers, cfg, viewId).fine;
}

SightRaySet assembleRays(const std::vector<VisibilityLabels>& labels, const std::vector<VirtualView>& views) {
  std::map<int, const VirtualView*> byId;
  for (const VirtualView& v : views) byId[v.id] = &v;
  std::set<std::pair<int, std::uint32_t>> seen;
  SightRaySet rays;
  for (const VisibilityLabels& l : labels) {
    const auto it = byId.find(l.viewId);
    if (it == byId.end()) throw Error(ErrorKind::BadInput, "labels refer to unknown view " + std::to_string(l.viewId));
    const Vec3 c = it->second->pose.center();
    for (std::uint32_t p : l.visible)
      if (seen.insert({l.viewId, p}).second) rays.push_back({c, p, l.viewId});
  }
  return rays;
}

std::string labelsToJson(const VisibilityLabels& labels) {
  return json{{"view_id", labels.viewId}, {"visible", labels.visible}, {"occluded", labels.occluded}}.dump();
}

VisibilityLabels labelsFromJson(const std::string& text) {
  try {
    const json j = json::parse(text);
    VisibilityLabels l;
    l.viewId = j.at("view_id").get<int>();
    l.visible = sortedUnique(j.at("visible").get<std::vector<std::uint32_t>>());
    l.occluded = sortedUnique(j.at("occluded").get<std::vector<std::uint32_t>>());
    std::vector<std::uint32_t> both;
    std::set_intersection(l.visible.begin(), l.visible.end(), l.occluded.begin(), l.occluded.end(),
                          std::back_inserter(both));
    if (!both.empty()) throw Error(ErrorKind::BadInput, "labels mark a point both visible and occluded");
    return l;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::BadInput, std::string("labels parse error: ") + e.what());
  }
}

}  // namespace vvgc
