#include "vvgc/pipeline.hpp"

#include <chrono>

#include "json.hpp"
#include "vvgc/delaunay.hpp"
#include "vvgc/render.hpp"

namespace vvgc {

using nlohmann::json;

ViewPattern parseViewPattern(const std::string& name) {
  if (name == "spherical") return ViewPattern::Spherical;
  if (name == "nadir") return ViewPattern::Nadir;
  if (name == "oblique") return ViewPattern::Oblique;
  if (name == "custom") return ViewPattern::Custom;
  throw Error(ErrorKind::BadInput, "unknown view pattern '" + name + "' (expected spherical, nadir, oblique or custom)");
}

std::string viewPatternName(ViewPattern p) {
  switch (p) {
    case ViewPattern::Spherical: return "spherical";
    case ViewPattern::Nadir: return "nadir";
    case ViewPattern::Oblique: return "oblique";
    case ViewPattern::Custom: return "custom";
  }
  return "";
}

std::vector<VirtualView> generateViews(const ViewConfig& cfg, const Aabb& box) {
  const Intrinsics intr = defaultIntrinsics(cfg.width, cfg.height, cfg.vfovDeg);
  switch (cfg.pattern) {
    case ViewPattern::Spherical: {
      auto views = sampleSpherical(box, cfg.nAzimuth, cfg.nElevation, cfg.radiusFactor, intr);
      if (cfg.polarViews) addPolarViews(views, box, cfg.radiusFactor, intr);
      return views;
    }
    case ViewPattern::Nadir: return sampleGridNadir(box, cfg.heightAgl, cfg.overlap, intr);
    case ViewPattern::Oblique: return sampleGridOblique(box, cfg.heightAgl, cfg.overlap, cfg.tiltDeg, intr);
    case ViewPattern::Custom: return loadCustomViews(cfg.customPath);
  }
  return {};
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds(Clock::time_point a, Clock::time_point b) { return std::chrono::duration<double>(b - a).count(); }

// Re-raises an error with the stage name prefixed.
template <typename F>
auto stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(name) + ": " + e.what());
  }
}

}  // namespace

VisibilityLabels estimateView(const PointCloud& cloud, const VirtualView& view, const PipelineConfig& cfg,
                              const TriangleMesh* gt) {
  if (cfg.estimator == Estimator::Hpr) return hprVisibility(cloud, view, cfg.est.hprExponent);
  const RenderBuffers b = renderPoints(cloud, view, cfg.splatRadius);
  if (cfg.estimator == Estimator::Oracle) {
    if (!gt) throw Error(ErrorKind::BadInput, "oracle requires ground truth");
    return oracleVisibility(b, renderMeshDepth(*gt, view), cfg.est.epsilon, view.id);
  }
  return cascadeVisibility(b, cfg.est, view.id);
}

ReconResult reconstruct(const PointCloud& cloud, const PipelineConfig& cfg, const std::vector<VirtualView>* customViews,
                        const TriangleMesh* gtMesh) {
  ReconResult r;
  validateParams(cfg.recon);
  stage("input", [&] {
    if (cloud.size() < 4) throw Error(ErrorKind::BadInput, "at least 4 points are required");
    validateCloud(cloud);
    return 0;
  });
  if (cfg.estimator == Estimator::Oracle && !gtMesh) throw Error(ErrorKind::BadInput, "visibility: oracle requires ground truth");
  auto [ncloud, xf] = stage("normalize", [&] { return normalizeCloud(cloud); });
  r.transform = xf;

  auto t0 = Clock::now();
  r.views = stage("views", [&] {
    std::vector<VirtualView> views;
    if (customViews) {
      for (const VirtualView& v : *customViews) views.push_back(viewToNormalized(v, xf));
    } else {
      views = generateViews(cfg.views, computeAabb(ncloud));
    }
    if (views.empty()) throw Error(ErrorKind::BadInput, "no views");
    return views;
  });
  auto t1 = Clock::now();
  r.times.views = seconds(t0, t1);

  TriangleMesh gtN;
  if (gtMesh) {
    gtN = *gtMesh;
    for (Vec3& v : gtN.vertices) v = xf.invert(v);
  }
  const TriangleMesh* gtPtr = gtMesh ? &gtN : nullptr;

  // Render and visibility run per view; per-view times are summed per stage.
  const std::size_t nv = r.views.size();
  r.labels.assign(nv, {});
  std::vector<double> renderTime(nv, 0), visTime(nv, 0);
  std::vector<std::string> viewWarnings(nv);
  stage("visibility", [&] {
    parallelForEach(nv, cfg.threads, [&](std::size_t k) {
      const VirtualView& view = r.views[k];
      auto a = Clock::now();
      VisibilityLabels labels;
      labels.viewId = view.id;
      if (cfg.estimator == Estimator::Hpr) {
        try {
          labels = hprVisibility(ncloud, view, cfg.est.hprExponent);
        } catch (const Error& e) {
          viewWarnings[k] = "view " + std::to_string(view.id) + " skipped: " + e.what();
        }
        visTime[k] = seconds(a, Clock::now());
      } else {
        const RenderBuffers b = renderPoints(ncloud, view, cfg.splatRadius);
        auto m = Clock::now();
        renderTime[k] = seconds(a, m);
        if (b.validCount() == 0) {
          viewWarnings[k] = "view " + std::to_string(view.id) + " skipped: nothing rendered";
        } else if (cfg.estimator == Estimator::Oracle) {
          labels = oracleVisibility(b, renderMeshDepth(*gtPtr, view), cfg.est.epsilon, view.id);
        } else {
          labels = cascadeVisibility(b, cfg.est, view.id);
        }
        visTime[k] = seconds(m, Clock::now());
      }
      r.labels[k] = std::move(labels);
    });
    return 0;
  });
  for (std::size_t k = 0; k < nv; ++k) {
    r.times.render += renderTime[k];
    r.times.visibility += visTime[k];
    if (!viewWarnings[k].empty()) r.warnings.push_back(viewWarnings[k]);
  }

  auto t2 = Clock::now();
  const SightRaySet rays = stage("visibility", [&] { return assembleRays(r.labels, r.views); });
  r.rays = rays.size();
  stage("reconstruction", [&] {
    std::vector<Vec3> pts = ncloud.positions;
    if (cfg.jitter > 0) pts = jitterPoints(pts, cfg.jitter, cfg.seed);
    const TetMesh mesh = tetrahedralize(pts);
    GraphOptions opt;
    opt.threads = cfg.threads;
    opt.forceUnitGamma = cfg.forceUnitGamma;
    const TetGraph graph = buildGraph(mesh, rays, cfg.recon, opt);
    const FlowGraph fg = graph.toFlowGraph(mesh);
    const MaxFlowResult cut = maxFlow(fg);
    const ExtractedSurface surf = extractSurface(mesh, cut.side);
    r.tets = mesh.tetCount();
    r.finiteTets = mesh.finiteTetCount();
    r.graphEdges = fg.edges.size();
    r.flow = cut.flow;
    r.mesh.triangles = surf.mesh.triangles;
    r.mesh.vertices.reserve(surf.sourceVertex.size());
    for (VertexId v : surf.sourceVertex) r.mesh.vertices.push_back(cloud.positions[v]);
    return 0;
  });
  r.times.reconstruction = seconds(t2, Clock::now());
  if (r.mesh.empty()) r.warnings.push_back("all tetrahedra received the same label; the surface is empty");
  return r;
}

std::string reportJson(const ReconResult& r, const PipelineConfig& cfg) {
  json j;
  j["views"] = r.views.size();
  j["rays"] = r.rays;
  j["tetrahedra"] = r.tets;
  j["finite_tetrahedra"] = r.finiteTets;
  j["graph_nodes"] = r.tets;
  j["graph_edges"] = r.graphEdges;
  j["flow"] = r.flow;
  j["mesh_vertices"] = r.mesh.vertices.size();
  j["mesh_triangles"] = r.mesh.triangles.size();
  j["timings_s"] = {{"views", r.times.views},
                    {"render", r.times.render},
                    {"visibility", r.times.visibility},
                    {"reconstruction", r.times.reconstruction}};
  j["warnings"] = r.warnings;
  j["config"] = {{"estimator", estimatorName(cfg.estimator)},
                 {"epsilon", cfg.est.epsilon},
                 {"hpr_exponent", cfg.est.hprExponent},
                 {"coarse_window", cfg.est.coarseWindow},
                 {"coarse_tau", cfg.est.coarseTau},
                 {"fine_tau", cfg.est.fineTau},
                 {"completion_iters", cfg.est.completionIters},
                 {"lambda_avw", cfg.recon.lambdaAvw},
                 {"lambda_ql", cfg.recon.lambdaQl},
                 {"sigma", cfg.recon.sigma},
                 {"alpha_max", cfg.recon.alphaMax},
                 {"pattern", viewPatternName(cfg.views.pattern)},
                 {"n_azimuth", cfg.views.nAzimuth},
                 {"n_elevation", cfg.views.nElevation},
                 {"polar_views", cfg.views.polarViews},
                 {"radius_factor", cfg.views.radiusFactor},
                 {"height_agl", cfg.views.heightAgl},
                 {"overlap", cfg.views.overlap},
                 {"tilt_deg", cfg.views.tiltDeg},
                 {"width", cfg.views.width},
                 {"height", cfg.views.height},
                 {"vfov_deg", cfg.views.vfovDeg},
                 {"splat_radius", cfg.splatRadius},
                 {"seed", cfg.seed},
                 {"jitter", cfg.jitter}};
  return j.dump(2);
}

}  // namespace vvgc
