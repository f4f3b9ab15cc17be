#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "json.hpp"
#include "vvgc/io.hpp"
#include "vvgc/visibility.hpp"

namespace vvgc {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CliRun {
  int status = -1;
  std::string output;  // stdout and stderr
};

CliRun vvgc(const std::string& args) {
  CliRun r;
  const std::string cmd = std::string(VVGC_CLI) + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf;
  while (std::fgets(buf.data(), buf.size(), p)) r.output += buf.data();
  const int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

// One small sphere dataset shared by the whole suite.
class Cli : public ::testing::Test {
protected:
  static void SetUpTestSuite() {
    root_ = fs::temp_directory_path() / ("vvgc_cli_" + std::to_string(::getpid()));
    fs::create_directories(root_);
    const CliRun r = vvgc("gen-dataset --scene sphere --points 3000 --output-dir " + path("data"));
    ASSERT_EQ(r.status, 0) << r.output;
  }
  static void TearDownTestSuite() { fs::remove_all(root_); }
  static std::string path(const std::string& name) { return (root_ / name).string(); }

  static fs::path root_;
};

fs::path Cli::root_;

TEST_F(Cli, ReconstructSphere) {
  const CliRun r = vvgc("reconstruct --input " + path("data/cloud.ply") + " --gt-mesh " + path("data/gt_mesh.ply") +
                     " --estimator oracle -o " + path("sphere.ply"));
  ASSERT_EQ(r.status, 0) << r.output;
  ASSERT_TRUE(fs::exists(path("sphere.ply")));
  EXPECT_FALSE(readMesh(path("sphere.ply")).empty());
  const json report = json::parse(readText(path("sphere.ply.json")));
  for (const char* k : {"views", "render", "visibility", "reconstruction"}) {
    ASSERT_TRUE(report["timings_s"].contains(k)) << k;
    EXPECT_GE(report["timings_s"][k].get<double>(), 0.0);
  }
  EXPECT_EQ(report["views"].get<int>(), 26);
  EXPECT_EQ(report["config"]["estimator"], "oracle");
}

TEST_F(Cli, ReconstructIsDeterministicAcrossRunsAndThreads) {
  const std::string args = "reconstruct --input " + path("data/cloud.ply") + " --gt-mesh " + path("data/gt_mesh.ply") +
                           " --estimator oracle --jitter 1e-6";
  ASSERT_EQ(vvgc("--seed 5 " + args + " -o " + path("a.ply")).status, 0);
  ASSERT_EQ(vvgc("--seed 5 " + args + " -o " + path("b.ply")).status, 0);
  ASSERT_EQ(vvgc("--seed 5 --threads 3 " + args + " -o " + path("c.ply")).status, 0);
  EXPECT_EQ(readText(path("a.ply")), readText(path("b.ply")));
  EXPECT_EQ(readText(path("a.ply")), readText(path("c.ply")));
}

TEST_F(Cli, MissingInputNamesPath) {
  const std::string missing = path("nowhere/cloud.ply");
  const CliRun r = vvgc("reconstruct --input " + missing + " -o " + path("x.ply"));
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.output.find(missing), std::string::npos) << r.output;
}

TEST_F(Cli, OracleWithoutGroundTruthFails) {
  const CliRun r = vvgc("estimate-visibility --input " + path("data/cloud.ply") + " --estimator oracle --output-dir " +
                     path("vis"));
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.output.find("oracle requires ground truth"), std::string::npos) << r.output;
}

TEST_F(Cli, EstimateVisibilityWritesLabels) {
  const CliRun r = vvgc("estimate-visibility --input " + path("data/cloud.ply") + " --estimator cascade --output-dir " +
                     path("vis"));
  ASSERT_EQ(r.status, 0) << r.output;
  for (int v = 0; v < 26; ++v) {
    const VisibilityLabels l = labelsFromJson(readText(path("vis/view_" + std::to_string(v) + "/labels.json")));
    EXPECT_EQ(l.viewId, v);
    EXPECT_FALSE(l.visible.empty());
  }
}

TEST_F(Cli, GenDatasetLayoutAndEpsilonRule) {
  int dirs = 0;
  for (const auto& e : fs::directory_iterator(root_ / "data"))
    if (e.is_directory()) ++dirs;
  EXPECT_EQ(dirs, 26);
  for (int v = 0; v < 26; ++v) {
    const fs::path d = root_ / "data" / ("view_" + std::to_string(v));
    int files = 0;
    for (const auto& e : fs::directory_iterator(d)) files += e.is_regular_file();
    EXPECT_EQ(files, 5);
    const DepthMap pd = readPfm((d / "pt_depth.pfm").string()), gd = readPfm((d / "gt_depth.pfm").string());
    const IdMap ids = readIdm((d / "pt_id.idm").string());
    const BitMask mask = readPgm((d / "mask.pgm").string());
    const std::string labelText = readText((d / "labels.json").string());
    const VisibilityLabels l = labelsFromJson(labelText);
    const VisibilityLabels back = labelsFromJson(labelsToJson(l));
    EXPECT_EQ(back.visible, l.visible);
    EXPECT_EQ(back.occluded, l.occluded);
    EXPECT_EQ(json::parse(labelsToJson(l)), json::parse(labelText));
    std::map<std::uint32_t, bool> anyClose;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      EXPECT_EQ(mask.data[i] != 0, ids.data[i] != kNoPoint);
      if (ids.data[i] == kNoPoint) continue;
      const bool close = std::fabs(double(pd.data[i]) - double(gd.data[i])) < 0.05;
      anyClose[ids.data[i]] = anyClose[ids.data[i]] || close;
    }
    EXPECT_EQ(anyClose.size(), l.visible.size() + l.occluded.size());
    for (std::uint32_t p : l.visible) EXPECT_TRUE(anyClose.at(p)) << "view " << v << " point " << p;
    for (std::uint32_t p : l.occluded) EXPECT_FALSE(anyClose.at(p)) << "view " << v << " point " << p;
  }
}

TEST_F(Cli, EvalGroundTruthAgainstItself) {
  const CliRun r = vvgc("eval --mesh " + path("data/gt_mesh.ply") + " --gt-mesh " + path("data/gt_mesh.ply") +
                     " -n 20000 -o " + path("eval.json"));
  ASSERT_EQ(r.status, 0) << r.output;
  const json j = json::parse(readText(path("eval.json")));
  for (const char* k : {"chamfer", "precision", "recall", "fscore", "K", "T"}) ASSERT_TRUE(j.contains(k)) << k;
  EXPECT_GE(j["fscore"].get<double>(), 0.99);
  EXPECT_LE(j["chamfer"].get<double>(), 1.05);
}

TEST_F(Cli, EvalEmptyMeshFails) {
  writePly(path("empty.ply"), TriangleMesh{});
  const CliRun r = vvgc("eval --mesh " + path("empty.ply") + " --gt-mesh " + path("data/gt_mesh.ply"));
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.output.find("empty mesh"), std::string::npos) << r.output;
}

TEST_F(Cli, SampleViewsCounts) {
  ASSERT_EQ(vvgc("sample-views --input " + path("data/cloud.ply") + " --pattern spherical --n-az 8 --n-el 3 -o " +
                 path("v24.json")).status, 0);
  EXPECT_EQ(json::parse(readText(path("v24.json")))["views"].size(), 24u);
  ASSERT_EQ(vvgc("sample-views --input " + path("data/cloud.ply") + " -o " + path("v26.json")).status, 0);
  EXPECT_EQ(json::parse(readText(path("v26.json")))["views"].size(), 26u);
}

TEST_F(Cli, RenderSinglePoint) {
  PointCloud one;
  one.positions = {{0, 0, 0}};
  writePly(path("one.ply"), one);
  writeText(path("one_view.json"), R"({"views":[{"eye":[0,0,-2],"target":[0,0,0],"up":[0,1,0]}]})");
  const CliRun r = vvgc("render --input " + path("one.ply") + " --views " + path("one_view.json") +
                     " --splat-radius 0 --output-dir " + path("one"));
  ASSERT_EQ(r.status, 0) << r.output;
  const DepthMap d = readPfm(path("one/view_0/pt_depth.pfm"));
  int finite = 0;
  for (float x : d.data) finite += std::isfinite(x);
  EXPECT_EQ(finite, 1);
}

TEST_F(Cli, BadArgumentsExitTwo) {
  EXPECT_EQ(vvgc("reconstruct --estimator nonsense --input " + path("data/cloud.ply") + " -o " + path("z.ply")).status, 2);
  EXPECT_EQ(vvgc("no-such-command").status, 2);
}

}  // namespace
}  // namespace vvgc
