#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "vvgc/bench.hpp"
#include "vvgc/pipeline.hpp"
#include "vvgc/scenes.hpp"

using namespace vvgc;

namespace {

void sweepHpr(std::size_t points, double eps) {
  std::printf("scene  exponent  agreement  precision  recall\n");
  for (const char* name : {"sphere", "box"}) {
    const SampledScene s = sampleNormalized(makeScene(name).mesh, points, 1);
    const auto views = defaultSphericalViews(computeAabb(s.cloud));
    for (double g : {0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0}) {
      BinaryScore total;
      for (const auto& v : views) {
        const auto ref = projectionOracle(s.cloud, v, renderMeshDepth(s.gt, v), eps);
        total += compareLabels(hprVisibility(s.cloud, v, g), ref);
      }
      std::printf("%-6s %8.2f  %9.4f  %9.4f  %6.4f\n", name, g, total.agreement(), total.precision(), total.recall());
    }
  }
}

void sweepCascade(std::size_t points, const EstimatorConfig& base, int splat, int configs) {
  std::printf("window  coarse_tau  fine_tau  coarse_f1  cascade_f1  worst_cascade  worst_margin\n");
  for (int window : {5, 7, 9}) {
    for (double ct : {0.01, 0.02, 0.03, 0.05, 0.08}) {
      for (double ft : {0.005, 0.01, 0.02, 0.03, 0.05}) {
        EstimatorConfig cfg = base;
        cfg.coarseWindow = window, cfg.coarseTau = ct, cfg.fineTau = ft;
        double sumC = 0, sumF = 0, worstF = 1, worstMargin = 1;
        for (int k = 1; k <= configs; ++k) {
          const SampledScene s = sampleNormalized(makeTwoPlanes(randomTwoPlaneConfig(k)), points, k);
          const auto views = defaultSphericalViews(computeAabb(s.cloud));
          BinaryScore coarse, fine;
          for (const auto& v : views) {
            const RenderBuffers b = renderPoints(s.cloud, v, splat);
            if (b.validCount() == 0) continue;
            const auto ref = oracleVisibility(b, renderMeshDepth(s.gt, v), base.epsilon, v.id);
            const CascadeResult r = cascadeStages(b, cfg, v.id);
            coarse += compareLabels(r.coarse, ref);
            fine += compareLabels(r.fine, ref);
          }
          sumC += coarse.f1(), sumF += fine.f1();
          worstF = std::min(worstF, fine.f1());
          worstMargin = std::min(worstMargin, fine.f1() - coarse.f1());
        }
        std::printf("%6d  %10.3f  %8.3f  %9.4f  %10.4f  %13.4f  %12.4f\n", window, ct, ft, sumC / configs,
                    sumF / configs, worstF, worstMargin);
      }
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parameter sweeps for the visibility estimators"};
  std::string what = "hpr";
  std::size_t points = 10000;
  int splat = 1, configs = 20, iters = 10;
  double eps = 0.05;
  app.add_option("what", what, "hpr | cascade");
  app.add_option("--points", points, "points per scene");
  app.add_option("--splat-radius", splat, "point splat radius");
  app.add_option("--configs", configs, "two-plane configurations");
  app.add_option("--completion-iters", iters, "depth completion smoothing iterations");
  app.add_option("--epsilon", eps, "oracle tolerance");
  CLI11_PARSE(app, argc, argv);
  try {
    if (what == "hpr") {
      sweepHpr(points, eps);
    } else {
      EstimatorConfig base;
      base.epsilon = eps;
      base.completionIters = iters;
      sweepCascade(points, base, splat, configs);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return static_cast<int>(e.kind());
  }
  return 0;
}
