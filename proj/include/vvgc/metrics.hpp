#pragma once

#include <cstdint>
#include <vector>

#include "vvgc/core.hpp"

namespace vvgc {

// Exact nearest-neighbor queries over a fixed point set.
class KdTree {
public:
  explicit KdTree(const std::vector<Vec3>& points);

  // Index of a nearest point and its squared distance; ties go to the lower index.
  std::pair<std::uint32_t, double> nearest(const Vec3& q) const;
  std::size_t size() const { return pts_.size(); }

private:
  struct Node {
    std::uint32_t begin = 0, end = 0;  // range in order_
    std::int32_t left = -1, right = -1;
    std::uint8_t axis = 0;
    double split = 0;
    Aabb box;
  };
  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  void search(std::int32_t node, const Vec3& q, std::uint32_t& best, double& bestD2) const;

  std::vector<Vec3> pts_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

struct MetricsCalibration {
  double K = 1.0;
  double T = 0.0;
};

struct MetricsReport {
  double chamfer = 0;
  double precision = 0, recall = 0, fscore = 0;
};

PointCloud sampleMesh(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed);

// Per-point distances from each point of `from` to its nearest neighbor in `to`.
std::vector<double> nearestDistances(const std::vector<Vec3>& from, const std::vector<Vec3>& to, unsigned threads = 1);

double chamfer(const PointCloud& p, const PointCloud& q, double K, unsigned threads = 1);

// P from the generated surface, Q from ground truth. Precision counts Q, recall counts P.
MetricsReport fscore(const PointCloud& p, const PointCloud& q, double T, unsigned threads = 1);

MetricsCalibration calibrate(const TriangleMesh& gt, std::size_t n, std::uint64_t seed1, std::uint64_t seed2,
                             unsigned threads = 1);

}  // namespace vvgc
