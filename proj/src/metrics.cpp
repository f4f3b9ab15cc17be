#include "vvgc/metrics.hpp"

#include "vvgc/parallel.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

namespace vvgc {
namespace {

constexpr std::uint32_t kLeafSize = 8;

double boxDistance2(const Aabb& b, const Vec3& q) {
  double d2 = 0;
  for (int k = 0; k < 3; ++k) {
    const double lo = b.min[k] - q[k], hi = q[k] - b.max[k];
    const double d = std::max({lo, hi, 0.0});
    d2 += d * d;
  }
  return d2;
}

void requireNonEmpty(const PointCloud& c) {
  if (c.empty()) throw Error(ErrorKind::BadInput, "empty point set");
}

}  // namespace

KdTree::KdTree(const std::vector<Vec3>& points) : pts_(points), order_(points.size()) {
  std::iota(order_.begin(), order_.end(), 0u);
  if (!pts_.empty()) build(0, static_cast<std::uint32_t>(pts_.size()));
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.emplace_back();
  nodes_[id].begin = begin;
  nodes_[id].end = end;
  Aabb box{pts_[order_[begin]], pts_[order_[begin]]};
  for (std::uint32_t i = begin; i < end; ++i) {
    const Vec3& p = pts_[order_[i]];
    box.min = {std::min(box.min.x, p.x), std::min(box.min.y, p.y), std::min(box.min.z, p.z)};
    box.max = {std::max(box.max.x, p.x), std::max(box.max.y, p.y), std::max(box.max.z, p.z)};
  }
  nodes_[id].box = box;
  if (end - begin <= kLeafSize) return id;
  const Vec3 ext = box.extent();
  const int axis = ext.x >= ext.y && ext.x >= ext.z ? 0 : (ext.y >= ext.z ? 1 : 2);
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     const double pa = pts_[a][axis], pb = pts_[b][axis];
                     return pa < pb || (pa == pb && a < b);
                   });
  nodes_[id].axis = static_cast<std::uint8_t>(axis);
  nodes_[id].split = pts_[order_[mid]][axis];
  const std::int32_t l = build(begin, mid);
  const std::int32_t r = build(mid, end);
  nodes_[id].left = l;
  nodes_[id].right = r;
  return id;
}

void KdTree::search(std::int32_t id, const Vec3& q, std::uint32_t& best, double& bestD2) const {
  const Node& n = nodes_[id];
  if (boxDistance2(n.box, q) > bestD2) return;
  if (n.left < 0) {
    for (std::uint32_t i = n.begin; i < n.end; ++i) {
      const std::uint32_t k = order_[i];
      const double d2 = squaredNorm(pts_[k] - q);
      if (d2 < bestD2 || (d2 == bestD2 && k < best)) best = k, bestD2 = d2;
    }
    return;
  }
  const bool goLeft = q[n.axis] < n.split;
  search(goLeft ? n.left : n.right, q, best, bestD2);
  search(goLeft ? n.right : n.left, q, best, bestD2);
}

std::pair<std::uint32_t, double> KdTree::nearest(const Vec3& q) const {
  if (pts_.empty()) throw Error(ErrorKind::BadInput, "nearest neighbor query on an empty set");
  std::uint32_t best = std::numeric_limits<std::uint32_t>::max();
  double bestD2 = std::numeric_limits<double>::infinity();
  search(0, q, best, bestD2);
  return {best, bestD2};
}

PointCloud sampleMesh(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed) {
  if (mesh.empty()) throw Error(ErrorKind::BadInput, "empty mesh");
  if (n == 0) throw Error(ErrorKind::BadInput, "sample count must be positive");
  std::vector<double> cumulative(mesh.triangles.size());
  double total = 0;
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
    const auto& t = mesh.triangles[i];
    total += 0.5 * norm(cross(mesh.vertices[t[1]] - mesh.vertices[t[0]], mesh.vertices[t[2]] - mesh.vertices[t[0]]));
    cumulative[i] = total;
  }
  if (!(total > 0)) throw Error(ErrorKind::Degenerate, "mesh has zero area");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  PointCloud out;
  out.positions.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double pick = u01(rng) * total;
    std::size_t i = std::upper_bound(cumulative.begin(), cumulative.end(), pick) - cumulative.begin();
    i = std::min(i, cumulative.size() - 1);
    while (i > 0 && cumulative[i] == cumulative[i - 1]) --i;  // never land on a zero-area triangle
    const auto& t = mesh.triangles[i];
    const double s = std::sqrt(u01(rng)), r = u01(rng);
    const Vec3 &a = mesh.vertices[t[0]], &b = mesh.vertices[t[1]], &c = mesh.vertices[t[2]];
    out.positions.push_back(a * (1 - s) + b * (s * (1 - r)) + c * (s * r));
  }
  return out;
}

std::vector<double> nearestDistances(const std::vector<Vec3>& from, const std::vector<Vec3>& to, unsigned threads) {
  const KdTree tree(to);
  std::vector<double> d(from.size());
  parallelForEach(from.size(), threads, [&](std::size_t i) { d[i] = std::sqrt(tree.nearest(from[i]).second); });
  return d;
}

double chamfer(const PointCloud& p, const PointCloud& q, double K, unsigned threads) {
  requireNonEmpty(p);
  requireNonEmpty(q);
  if (!(K > 0)) throw Error(ErrorKind::BadInput, "chamfer scale K must be positive");
  const auto dp = nearestDistances(p.positions, q.positions, threads);
  const auto dq = nearestDistances(q.positions, p.positions, threads);
  const double sp = std::accumulate(dp.begin(), dp.end(), 0.0) / static_cast<double>(dp.size());
  const double sq = std::accumulate(dq.begin(), dq.end(), 0.0) / static_cast<double>(dq.size());
  return K * sp + K * sq;
}

MetricsReport fscore(const PointCloud& p, const PointCloud& q, double T, unsigned threads) {
  requireNonEmpty(p);
  requireNonEmpty(q);
  if (!(T > 0)) throw Error(ErrorKind::BadInput, "F-score threshold must be positive");
  const auto dq = nearestDistances(q.positions, p.positions, threads);
  const auto dp = nearestDistances(p.positions, q.positions, threads);
  MetricsReport r;
  r.precision = static_cast<double>(std::count_if(dq.begin(), dq.end(), [&](double d) { return d < T; })) / dq.size();
  r.recall = static_cast<double>(std::count_if(dp.begin(), dp.end(), [&](double d) { return d < T; })) / dp.size();
  r.fscore = r.precision + r.recall > 0 ? 2 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  return r;
}

MetricsCalibration calibrate(const TriangleMesh& gt, std::size_t n, std::uint64_t seed1, std::uint64_t seed2,
                             unsigned threads) {
  if (n < 100) throw Error(ErrorKind::BadInput, "calibration needs at least 100 samples");
  const PointCloud s1 = sampleMesh(gt, n, seed1), s2 = sampleMesh(gt, n, seed2);
  MetricsCalibration c;
  const double raw = chamfer(s1, s2, 1.0, threads);
  if (!(raw > 0)) throw Error(ErrorKind::Degenerate, "calibration samplings coincide");
  c.K = 1.0 / raw;
  const auto d = nearestDistances(s1.positions, s2.positions, threads);
  c.T = *std::max_element(d.begin(), d.end());
  return c;
}

}  // namespace vvgc
