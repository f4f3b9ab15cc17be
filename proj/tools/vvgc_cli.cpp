#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "vvgc/io.hpp"
#include "vvgc/metrics.hpp"
#include "vvgc/pipeline.hpp"
#include "vvgc/render.hpp"
#include "vvgc/scenes.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace vvgc;

namespace {

struct Args {
  std::string config;
  std::string input, output, report, views, gtMesh, outDir, mesh, scene = "sphere";
  std::string estimator, pattern;
  std::size_t points = 10000, samples = 100000;
  int viewId = -1;
  int polar = -1;  // -1 unset, 0 off, 1 on
  bool countsGiven = false;
  PipelineConfig cfg;
};

template <typename T>
void take(const json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

// Config file keys use the same names as the report's "config" block.
void applyConfig(const json& j, Args& a) {
  PipelineConfig& c = a.cfg;
  if (j.contains("estimator")) c.estimator = parseEstimator(j.at("estimator").get<std::string>());
  if (j.contains("pattern")) c.views.pattern = parseViewPattern(j.at("pattern").get<std::string>());
  take(j, "epsilon", c.est.epsilon);
  take(j, "hpr_exponent", c.est.hprExponent);
  take(j, "coarse_window", c.est.coarseWindow);
  take(j, "coarse_tau", c.est.coarseTau);
  take(j, "fine_tau", c.est.fineTau);
  take(j, "completion_iters", c.est.completionIters);
  take(j, "lambda_avw", c.recon.lambdaAvw);
  take(j, "lambda_ql", c.recon.lambdaQl);
  take(j, "sigma", c.recon.sigma);
  take(j, "alpha_max", c.recon.alphaMax);
  take(j, "n_azimuth", c.views.nAzimuth);
  take(j, "n_elevation", c.views.nElevation);
  take(j, "polar_views", c.views.polarViews);
  take(j, "radius_factor", c.views.radiusFactor);
  take(j, "height_agl", c.views.heightAgl);
  take(j, "overlap", c.views.overlap);
  take(j, "tilt_deg", c.views.tiltDeg);
  take(j, "width", c.views.width);
  take(j, "height", c.views.height);
  take(j, "vfov_deg", c.views.vfovDeg);
  take(j, "splat_radius", c.splatRadius);
  take(j, "seed", c.seed);
  take(j, "jitter", c.jitter);
  take(j, "threads", c.threads);
  take(j, "input", a.input);
  take(j, "output", a.output);
  take(j, "report", a.report);
  take(j, "views", a.views);
  take(j, "gt_mesh", a.gtMesh);
  take(j, "points", a.points);
  take(j, "samples", a.samples);
}

void loadConfigFromArgv(int argc, char** argv, Args& a) {
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) != "--config") continue;
    const std::string path = argv[i + 1];
    json j;
    try {
      j = json::parse(readText(path));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::BadInput, "config '" + path + "': " + e.what());
    }
    try {
      applyConfig(j, a);
    } catch (const json::exception& e) {
      throw Error(ErrorKind::BadInput, "config '" + path + "': " + e.what());
    }
  }
}

void addEstimatorOptions(CLI::App* app, Args& a) {
  app->add_option("--estimator", a.estimator, "oracle | hpr | cascade");
  app->add_option("--epsilon", a.cfg.est.epsilon, "oracle depth tolerance (normalized units)");
  app->add_option("--hpr-exponent", a.cfg.est.hprExponent, "HPR flip radius exponent");
  app->add_option("--coarse-window", a.cfg.est.coarseWindow, "cascade coarse window (pixels, odd)");
  app->add_option("--coarse-tau", a.cfg.est.coarseTau, "cascade coarse depth tolerance");
  app->add_option("--fine-tau", a.cfg.est.fineTau, "cascade fine depth tolerance");
  app->add_option("--completion-iters", a.cfg.est.completionIters, "depth completion smoothing iterations");
  app->add_option("--splat-radius", a.cfg.splatRadius, "point splat radius in pixels");
}

void addViewOptions(CLI::App* app, Args& a) {
  app->add_option("--pattern", a.pattern, "spherical | nadir | oblique | custom");
  app->add_option("--n-az", a.cfg.views.nAzimuth, "azimuth samples")->each([&a](const std::string&) { a.countsGiven = true; });
  app->add_option("--n-el", a.cfg.views.nElevation, "elevation rings")->each([&a](const std::string&) { a.countsGiven = true; });
  app->add_flag_callback("--polar", [&a] { a.polar = 1; }, "add the two near-polar views (default unless --n-az/--n-el given)");
  app->add_flag_callback("--no-polar", [&a] { a.polar = 0; }, "omit the two near-polar views");
  app->add_option("--radius-factor", a.cfg.views.radiusFactor, "camera distance over bbox diagonal");
  app->add_option("--height-agl", a.cfg.views.heightAgl, "grid camera height above the top");
  app->add_option("--overlap", a.cfg.views.overlap, "grid footprint overlap in [0, 1)");
  app->add_option("--tilt", a.cfg.views.tiltDeg, "oblique tilt in degrees");
  app->add_option("--image-width", a.cfg.views.width, "image width");
  app->add_option("--image-height", a.cfg.views.height, "image height");
  app->add_option("--vfov", a.cfg.views.vfovDeg, "vertical field of view in degrees");
}

void addReconOptions(CLI::App* app, Args& a) {
  app->add_option("--lambda-avw", a.cfg.recon.lambdaAvw, "adaptive visibility weight in [0, 1]");
  app->add_option("--lambda-ql", a.cfg.recon.lambdaQl, "surface quality weight");
  app->add_option("--sigma", a.cfg.recon.sigma, "soft visibility decay (normalized units)");
  app->add_option("--alpha-max", a.cfg.recon.alphaMax, "soft visibility ceiling");
  app->add_option("--jitter", a.cfg.jitter, "Delaunay input jitter (normalized units)");
}

void finalizeChoices(Args& a) {
  if (!a.estimator.empty()) a.cfg.estimator = parseEstimator(a.estimator);
  if (!a.pattern.empty()) a.cfg.views.pattern = parseViewPattern(a.pattern);
  if (a.polar >= 0) a.cfg.views.polarViews = a.polar == 1;
  else if (a.countsGiven) a.cfg.views.polarViews = false;
  if (a.cfg.threads == 0) throw Error(ErrorKind::BadInput, "--threads must be at least 1");
}

template <typename F>
auto inStage(const std::string& stage, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.kind(), stage + ": " + e.what());
  }
}

PointCloud loadCloud(const std::string& path) {
  if (path.empty()) throw Error(ErrorKind::BadInput, "reading input: no --input given");
  return inStage("reading input '" + path + "'", [&] { return readPointCloud(path); });
}

TriangleMesh loadMesh(const std::string& path, const char* what) {
  return inStage(std::string("reading ") + what + " '" + path + "'", [&] { return readMesh(path); });
}

std::vector<VirtualView> viewsFor(const Args& a, const Aabb& box) {
  if (!a.views.empty()) return inStage("reading views '" + a.views + "'", [&] { return loadCustomViews(a.views); });
  if (a.cfg.views.pattern == ViewPattern::Custom) throw Error(ErrorKind::BadInput, "views: custom pattern needs --views");
  return inStage("views", [&] { return generateViews(a.cfg.views, box); });
}

TriangleMesh normalizedMesh(TriangleMesh m, const NormTransform& xf) {
  for (Vec3& v : m.vertices) v = xf.invert(v);
  return m;
}

void ensureDir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(ErrorKind::Io, "cannot create directory '" + dir.string() + "'");
}

std::string viewDirName(int id) { return "view_" + std::to_string(id); }

int cmdSampleViews(const Args& a) {
  const Aabb box = a.input.empty() ? Aabb{{-1, -1, -1}, {1, 1, 1}} : computeAabb(loadCloud(a.input));
  const auto views = viewsFor(a, box);
  if (a.output.empty()) {
    std::cout << viewsToJson(views) << "\n";
  } else {
    inStage("writing '" + a.output + "'", [&] {
      saveViews(a.output, views);
      return 0;
    });
  }
  std::cerr << views.size() << " views\n";
  return 0;
}

int cmdRender(const Args& a) {
  const PointCloud cloud = loadCloud(a.input);
  const auto views = viewsFor(a, computeAabb(cloud));
  if (a.outDir.empty()) throw Error(ErrorKind::BadInput, "render: --output-dir is required");
  for (const VirtualView& v : views) {
    if (a.viewId >= 0 && v.id != a.viewId) continue;
    const RenderBuffers b = inStage("render view " + std::to_string(v.id), [&] {
      return renderPoints(cloud, v, a.cfg.splatRadius);
    });
    const fs::path dir = fs::path(a.outDir) / viewDirName(v.id);
    ensureDir(dir);
    writePfm((dir / "pt_depth.pfm").string(), b.depth);
    writeIdm((dir / "pt_id.idm").string(), b.id);
    writePgm((dir / "mask.pgm").string(), b.mask);
  }
  return 0;
}

int cmdEstimate(const Args& a) {
  const PointCloud cloud = loadCloud(a.input);
  if (a.cfg.estimator == Estimator::Oracle && a.gtMesh.empty())
    throw Error(ErrorKind::BadInput, "visibility: oracle requires ground truth (--gt-mesh)");
  if (a.outDir.empty()) throw Error(ErrorKind::BadInput, "estimate-visibility: --output-dir is required");
  const auto views = viewsFor(a, computeAabb(cloud));
  const auto [ncloud, xf] = normalizeCloud(cloud);
  TriangleMesh gt;
  if (!a.gtMesh.empty()) gt = normalizedMesh(loadMesh(a.gtMesh, "ground truth"), xf);
  std::vector<VisibilityLabels> labels(views.size());
  inStage("visibility", [&] {
    parallelForEach(views.size(), a.cfg.threads, [&](std::size_t k) {
      labels[k] = estimateView(ncloud, viewToNormalized(views[k], xf), a.cfg, a.gtMesh.empty() ? nullptr : &gt);
    });
    return 0;
  });
  for (std::size_t k = 0; k < views.size(); ++k) {
    const fs::path dir = fs::path(a.outDir) / viewDirName(views[k].id);
    ensureDir(dir);
    writeText((dir / "labels.json").string(), labelsToJson(labels[k]) + "\n");
  }
  return 0;
}

int cmdReconstruct(const Args& a) {
  if (a.output.empty()) throw Error(ErrorKind::BadInput, "reconstruct: --output is required");
  const PointCloud cloud = loadCloud(a.input);
  std::vector<VirtualView> custom;
  if (!a.views.empty()) custom = inStage("reading views '" + a.views + "'", [&] { return loadCustomViews(a.views); });
  TriangleMesh gt;
  if (!a.gtMesh.empty()) gt = loadMesh(a.gtMesh, "ground truth");
  const ReconResult r = reconstruct(cloud, a.cfg, a.views.empty() ? nullptr : &custom, a.gtMesh.empty() ? nullptr : &gt);
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
  inStage("writing mesh '" + a.output + "'", [&] {
    writePly(a.output, r.mesh);
    return 0;
  });
  const std::string report = a.report.empty() ? a.output + ".json" : a.report;
  inStage("writing report '" + report + "'", [&] {
    writeText(report, reportJson(r, a.cfg) + "\n");
    return 0;
  });
  std::cerr << r.mesh.triangles.size() << " triangles, " << r.rays << " lines of sight\n";
  return 0;
}

int cmdEval(const Args& a) {
  if (a.mesh.empty() || a.gtMesh.empty()) throw Error(ErrorKind::BadInput, "eval: --mesh and --gt-mesh are required");
  const TriangleMesh gen = loadMesh(a.mesh, "mesh");
  const TriangleMesh gt = loadMesh(a.gtMesh, "ground truth");
  if (gen.empty()) throw Error(ErrorKind::BadInput, "eval: empty mesh '" + a.mesh + "'");
  const unsigned t = a.cfg.threads;
  const std::uint64_t s = a.cfg.seed;
  const MetricsCalibration cal = inStage("calibration", [&] { return calibrate(gt, a.samples, s * 4 + 1, s * 4 + 2, t); });
  MetricsReport m;
  inStage("metrics", [&] {
    const PointCloud p = sampleMesh(gen, a.samples, s * 4 + 3);
    const PointCloud q = sampleMesh(gt, a.samples, s * 4 + 4);
    m = fscore(p, q, cal.T, t);
    m.chamfer = chamfer(p, q, cal.K, t);
    return 0;
  });
  json j = {{"chamfer", m.chamfer}, {"precision", m.precision}, {"recall", m.recall}, {"fscore", m.fscore},
            {"K", cal.K},         {"T", cal.T},                 {"n", a.samples}};
  const std::string text = j.dump(2);
  if (a.output.empty()) {
    std::cout << text << "\n";
  } else {
    writeText(a.output, text + "\n");
  }
  return 0;
}

// Writes cloud.ply, gt_mesh.ply and views.json in the normalized frame plus one directory per view.
int cmdGenDataset(const Args& a) {
  if (a.outDir.empty()) throw Error(ErrorKind::BadInput, "gen-dataset: --output-dir is required");
  const SyntheticScene scene = makeScene(a.scene, a.cfg.seed);
  const PointCloud raw = sampleMesh(scene.mesh, a.points, a.cfg.seed);
  const auto [cloud, xf] = normalizeCloud(raw);
  const TriangleMesh gt = normalizedMesh(scene.mesh, xf);
  const auto views = viewsFor(a, computeAabb(cloud));
  const fs::path root(a.outDir);
  ensureDir(root);
  writePly((root / "cloud.ply").string(), cloud);
  writePly((root / "gt_mesh.ply").string(), gt);
  saveViews((root / "views.json").string(), views);
  std::vector<std::string> errors(views.size());
  inStage("gen-dataset", [&] {
    parallelForEach(views.size(), a.cfg.threads, [&](std::size_t k) {
      const VirtualView& v = views[k];
      const RenderBuffers b = renderPoints(cloud, v, a.cfg.splatRadius);
      const DepthMap sd = renderMeshDepth(gt, v);
      const VisibilityLabels labels = oracleVisibility(b, sd, a.cfg.est.epsilon, v.id);
      const fs::path dir = root / viewDirName(v.id);
      ensureDir(dir);
      writePfm((dir / "pt_depth.pfm").string(), b.depth);
      writeIdm((dir / "pt_id.idm").string(), b.id);
      writePgm((dir / "mask.pgm").string(), b.mask);
      writePfm((dir / "gt_depth.pfm").string(), sd);
      writeText((dir / "labels.json").string(), labelsToJson(labels) + "\n");
    });
    return 0;
  });
  std::cerr << views.size() << " views written to " << root.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Args a;
  CLI::App app{"Visibility-driven Delaunay graph-cut surface reconstruction"};
  app.require_subcommand(1);
  app.add_option("--config", a.config, "JSON config; flags override it");
  app.add_option("--threads", a.cfg.threads, "worker threads");
  app.add_option("--seed", a.cfg.seed, "RNG seed");

  auto* sv = app.add_subcommand("sample-views", "generate virtual views");
  sv->add_option("--input", a.input, "point cloud PLY (sets the bounding box)");
  sv->add_option("--output,-o", a.output, "views JSON (stdout if omitted)");
  addViewOptions(sv, a);

  auto* rd = app.add_subcommand("render", "render point depth, id and mask maps");
  rd->add_option("--input", a.input, "point cloud PLY")->required();
  rd->add_option("--views", a.views, "views JSON (generated if omitted)");
  rd->add_option("--view-id", a.viewId, "render only this view");
  rd->add_option("--output-dir", a.outDir, "output directory")->required();
  rd->add_option("--splat-radius", a.cfg.splatRadius, "point splat radius in pixels");
  addViewOptions(rd, a);

  auto* ev = app.add_subcommand("estimate-visibility", "per-view visibility labels");
  ev->add_option("--input", a.input, "point cloud PLY")->required();
  ev->add_option("--views", a.views, "views JSON (generated if omitted)");
  ev->add_option("--gt-mesh", a.gtMesh, "ground-truth mesh PLY (oracle)");
  ev->add_option("--output-dir", a.outDir, "output directory")->required();
  addEstimatorOptions(ev, a);
  addViewOptions(ev, a);

  auto* rc = app.add_subcommand("reconstruct", "reconstruct a watertight mesh");
  rc->add_option("--input", a.input, "point cloud PLY");
  rc->add_option("--output,-o", a.output, "mesh PLY");
  rc->add_option("--report", a.report, "run report JSON (default <output>.json)");
  rc->add_option("--views", a.views, "custom views JSON");
  rc->add_option("--gt-mesh", a.gtMesh, "ground-truth mesh PLY (oracle)");
  addEstimatorOptions(rc, a);
  addViewOptions(rc, a);
  addReconOptions(rc, a);

  auto* el = app.add_subcommand("eval", "chamfer distance and F-score against ground truth");
  el->add_option("--mesh", a.mesh, "generated mesh PLY")->required();
  el->add_option("--gt-mesh", a.gtMesh, "ground-truth mesh PLY")->required();
  el->add_option("--samples,-n", a.samples, "surface samples per mesh");
  el->add_option("--output,-o", a.output, "report JSON (stdout if omitted)");

  auto* gd = app.add_subcommand("gen-dataset", "synthetic scene with oracle labels");
  gd->add_option("--scene", a.scene, "sphere | box | torus | two-planes | cage");
  gd->add_option("--points", a.points, "sampled point count");
  gd->add_option("--output-dir", a.outDir, "output directory")->required();
  gd->add_option("--views", a.views, "views JSON (generated if omitted)");
  gd->add_option("--epsilon", a.cfg.est.epsilon, "oracle depth tolerance (normalized units)");
  gd->add_option("--splat-radius", a.cfg.splatRadius, "point splat radius in pixels");
  addViewOptions(gd, a);

  try {
    loadConfigFromArgv(argc, argv, a);
    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      return app.exit(e) == 0 ? 0 : 2;
    }
    finalizeChoices(a);
    if (sv->parsed()) return cmdSampleViews(a);
    if (rd->parsed()) return cmdRender(a);
    if (ev->parsed()) return cmdEstimate(a);
    if (rc->parsed()) return cmdReconstruct(a);
    if (el->parsed()) return cmdEval(a);
    if (gd->parsed()) return cmdGenDataset(a);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.kind());
  } catch (const std::bad_alloc&) {
    std::cerr << "error: out of memory\n";
    return 3;
  }
  return 0;
}
