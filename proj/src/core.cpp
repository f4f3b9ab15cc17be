#include "vvgc/core.hpp"

#include <algorithm>

namespace vvgc {

double TriangleMesh::area() const {
  double a = 0;
  for (const auto& t : triangles)
    a += 0.5 * norm(cross(vertices[t[1]] - vertices[t[0]], vertices[t[2]] - vertices[t[0]]));
  return a;
}

Vec3 TriangleMesh::flux() const {
  Vec3 f;
  for (const auto& t : triangles) f += cross(vertices[t[1]] - vertices[t[0]], vertices[t[2]] - vertices[t[0]]) * 0.5;
  return f;
}

double TriangleMesh::signedVolume() const {
  double v = 0;
  for (const auto& t : triangles) v += dot(vertices[t[0]], cross(vertices[t[1]], vertices[t[2]])) / 6.0;
  return v;
}

Aabb computeAabb(const std::vector<Vec3>& points) {
  if (points.empty()) throw Error(ErrorKind::BadInput, "empty input");
  Aabb box{points.front(), points.front()};
  for (const Vec3& p : points) {
    box.min = {std::min(box.min.x, p.x), std::min(box.min.y, p.y), std::min(box.min.z, p.z)};
    box.max = {std::max(box.max.x, p.x), std::max(box.max.y, p.y), std::max(box.max.z, p.z)};
  }
  return box;
}

Aabb computeAabb(const PointCloud& cloud) { return computeAabb(cloud.positions); }

std::pair<PointCloud, NormTransform> normalizeCloud(const PointCloud& cloud) {
  const Aabb box = computeAabb(cloud);
  const double diag = box.diagonal();
  if (!(diag > 0) || !std::isfinite(diag)) throw Error(ErrorKind::Degenerate, "degenerate extent");

  NormTransform xf{box.center(), diag};
  PointCloud out;
  out.colors = cloud.colors;
  out.positions.reserve(cloud.size());
  for (const Vec3& p : cloud.positions) out.positions.push_back(xf.invert(p));
  return {std::move(out), xf};
}

void validateCloud(const PointCloud& cloud) {
  for (std::size_t i = 0; i < cloud.size(); ++i)
    if (!isFinite(cloud.positions[i]))
      throw Error(ErrorKind::BadInput, "non-finite coordinate at point " + std::to_string(i));
  if (!cloud.colors.empty() && cloud.colors.size() != cloud.size())
    throw Error(ErrorKind::BadInput, "color count does not match point count");
}

}  // namespace vvgc
