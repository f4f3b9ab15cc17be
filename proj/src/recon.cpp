#include "vvgc/recon.hpp"

#include "vvgc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace vvgc {

void validateParams(const ReconParams& p) {
  if (!(p.lambdaAvw >= 0 && p.lambdaAvw <= 1)) throw Error(ErrorKind::BadInput, "lambda_avw must lie in [0, 1]");
  if (!(p.lambdaQl >= 0) || !std::isfinite(p.lambdaQl)) throw Error(ErrorKind::BadInput, "lambda_ql must be >= 0");
  if (!(p.sigma > 0) || !std::isfinite(p.sigma)) throw Error(ErrorKind::BadInput, "sigma must be > 0");
  if (!(p.alphaMax > 0) || !std::isfinite(p.alphaMax)) throw Error(ErrorKind::BadInput, "alpha_max must be > 0");
}

double softVisWeight(double d, double sigma, double alphaMax) {
  return alphaMax * (1.0 - std::exp(-d * d / (2.0 * sigma * sigma)));
}

double gammaAvw(const Vec3& rayDir, std::span<const Vec3> facetNormals, double lambdaAvw) {
  auto unit = [](const Vec3& v) { return std::fabs(norm(v) - 1.0) <= 1e-9; };
  if (!unit(rayDir)) throw Error(ErrorKind::BadInput, "gamma_avw: ray direction is not unit length");
  if (facetNormals.empty()) throw Error(ErrorKind::BadInput, "gamma_avw: no facet normals");
  double best = -1.0;
  for (const Vec3& n : facetNormals) {
    if (!unit(n)) throw Error(ErrorKind::BadInput, "gamma_avw: facet normal is not unit length");
    best = std::max(best, dot(rayDir, n));
  }
  return std::max(0.0, (1.0 - lambdaAvw) + lambdaAvw * best);
}

double qualityWeight(const Vec3& a, const Vec3& b, const Vec3& c) {
  const double la = distance(b, c), lb = distance(c, a), lc = distance(a, b);
  const double area = 0.5 * norm(cross(b - a, c - a));
  const double perimeter = la + lb + lc;
  if (!(area > 0) || !(perimeter > 0)) return 1.0;
  // 2 r_in / r_circ = 16 A^2 / (P a b c)
  const double ratio = 16.0 * area * area / (perimeter * la * lb * lc);
  return 1.0 - std::min(1.0, ratio);
}

FlowGraph TetGraph::toFlowGraph(const TetMesh& mesh) const {
  FlowGraph g(sourceCap.size());
  g.sourceCap = sourceCap;
  g.sinkCap = sinkCap;
  for (TetId t = 0; t < mesh.tetCount(); ++t)
    for (int i = 0; i < 4; ++i) {
      const TetId n = mesh.neighbors[t][i];
      if (n < t) continue;
      const int back = mesh.neighborSlot(n, t);
      g.addEdge(t, n, facetCap[t][i], facetCap[n][back]);
    }
  return g;
}

std::vector<Vec3> behindFacetNormals(const TetMesh& mesh, TetId behind, VertexId point) {
  std::vector<Vec3> normals;
  for (int i = 0; i < 4; ++i) {
    if (mesh.tets[behind][i] == point) continue;  // the face opposite the endpoint does not contain it
    const auto f = mesh.face(behind, i);
    if (f[0] == TetMesh::kInfinite || f[1] == TetMesh::kInfinite || f[2] == TetMesh::kInfinite) continue;
    // kFace order puts the tet's own side (or the infinite side) on the positive side.
    const Vec3 n = cross(mesh.vertices[f[1]] - mesh.vertices[f[0]], mesh.vertices[f[2]] - mesh.vertices[f[0]]);
    const double len = norm(n);
    if (len > 0) normals.push_back(n / len);
  }
  return normals;
}

namespace {

struct RayWeights {
  TetId first = TetMesh::kNoTet;
  TetId behind = TetMesh::kNoTet;
  double sinkWeight = 0;
  std::vector<std::pair<TetId, int>> facets;
  std::vector<double> weights;
};

RayWeights weighRay(const TetMesh& mesh, const SightRay& ray, TetId cameraTet, const ReconParams& p,
                    bool unitGamma) {
  const RayTraversal tr = walkRay(mesh, ray.point, ray.camera, cameraTet);
  VertexId v = ray.point;
  if (mesh.duplicateOf[v] != TetMesh::kInfinite) v = mesh.duplicateOf[v];
  double gamma = 1.0;
  if (!unitGamma) {
    const std::vector<Vec3> normals = behindFacetNormals(mesh, tr.behind, v);
    if (!normals.empty()) gamma = gammaAvw(normalized(mesh.vertices[v] - ray.camera), normals, p.lambdaAvw);
  }
  RayWeights w;
  w.first = tr.tets.front();
  w.behind = tr.behind;
  w.sinkWeight = gamma * softVisWeight(p.sigma, p.sigma, p.alphaMax);
  for (const FacetCrossing& c : tr.crossings) {
    w.facets.push_back({c.from, c.face});
    w.weights.push_back(gamma * softVisWeight(c.distanceToEnd, p.sigma, p.alphaMax));
  }
  return w;
}

}  // namespace

TetGraph buildGraph(const TetMesh& mesh, const SightRaySet& rays, const ReconParams& params,
                    const GraphOptions& options) {
  validateParams(params);
  if (rays.empty()) throw Error(ErrorKind::BadInput, "no visibility information");
  for (const SightRay& r : rays)
    if (r.point >= mesh.vertices.size()) throw Error(ErrorKind::BadInput, "sight ray endpoint is not a mesh vertex");

  const std::size_t nt = mesh.tetCount();
  TetGraph g;
  g.sourceCap.assign(nt, 0.0);
  g.sinkCap.assign(nt, 0.0);
  g.facetCap.assign(nt, {0, 0, 0, 0});
  g.rayCount = rays.size();
  g.infiniteCap = 1e9 * params.alphaMax * static_cast<double>(rays.size());

  // Cameras are shared by many rays; locate each once.
  std::map<std::tuple<double, double, double>, TetId> cameraTets;
  std::vector<TetId> rayCameraTet(rays.size());
  TetId hint = 0;
  for (std::size_t k = 0; k < rays.size(); ++k) {
    const Vec3& c = rays[k].camera;
    auto [it, fresh] = cameraTets.try_emplace({c.x, c.y, c.z}, TetMesh::kNoTet);
    if (fresh) it->second = hint = locate(mesh, c, hint);
    rayCameraTet[k] = it->second;
  }

  constexpr std::size_t kBlock = 8192;
  std::vector<RayWeights> block;
  for (std::size_t start = 0; start < rays.size(); start += kBlock) {
    const std::size_t end = std::min(rays.size(), start + kBlock);
    block.assign(end - start, {});
    parallelForEach(end - start, options.threads, [&](std::size_t k) {
      block[k] = weighRay(mesh, rays[start + k], rayCameraTet[start + k], params, options.forceUnitGamma);
    });
    // Sequential reduction in ray order keeps sums independent of the thread count.
    for (const RayWeights& w : block) {
      g.sourceCap[w.first] = g.infiniteCap;
      g.sinkCap[w.behind] += w.sinkWeight;
      for (std::size_t i = 0; i < w.facets.size(); ++i) g.facetCap[w.facets[i].first][w.facets[i].second] += w.weights[i];
    }
  }

  if (params.lambdaQl > 0) {
    for (TetId t = 0; t < nt; ++t) {
      if (mesh.isInfinite(t)) continue;
      for (int i = 0; i < 4; ++i) {
        const TetId n = mesh.neighbors[t][i];
        if (mesh.isInfinite(n)) continue;
        const auto f = mesh.face(t, i);
        g.facetCap[t][i] += params.lambdaQl * qualityWeight(mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]]);
      }
    }
  }
  return g;
}

ExtractedSurface extractSurface(const TetMesh& mesh, const CutLabels& labels) {
  if (labels.size() != mesh.tetCount()) throw Error(ErrorKind::BadInput, "labels do not cover all tetrahedra");
  std::vector<std::array<VertexId, 3>> faces;
  for (TetId t = 0; t < mesh.tetCount(); ++t) {
    if (mesh.isInfinite(t) || labels[t] != Side::Sink) continue;
    for (int i = 0; i < 4; ++i) {
      const TetId n = mesh.neighbors[t][i];
      if (!mesh.isInfinite(n) && labels[n] == Side::Sink) continue;
      // kFace order faces into t; reverse it so the normal leaves the INNER tet.
      const auto f = mesh.face(t, i);
      faces.push_back({f[0], f[2], f[1]});
    }
  }
  ExtractedSurface out;
  std::vector<std::uint32_t> remap(mesh.vertices.size(), TetMesh::kInfinite);
  for (const auto& f : faces)
    for (VertexId v : f) remap[v] = 0;
  for (VertexId v = 0; v < mesh.vertices.size(); ++v)
    if (remap[v] == 0) {
      remap[v] = static_cast<std::uint32_t>(out.sourceVertex.size());
      out.sourceVertex.push_back(v);
      out.mesh.vertices.push_back(mesh.vertices[v]);
    }
  for (const auto& f : faces) out.mesh.triangles.push_back({remap[f[0]], remap[f[1]], remap[f[2]]});
  return out;
}

}  // namespace vvgc
