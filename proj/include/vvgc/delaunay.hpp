#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "vvgc/core.hpp"

namespace vvgc {

using VertexId = std::uint32_t;
using TetId = std::uint32_t;

// Delaunay tetrahedralization closed by a symbolic infinite vertex.
//
// Vertex i of the mesh is point i of the input cloud. Every tetrahedron is
// stored positively oriented (orient3d(v0,v1,v2,v3) > 0); an infinite
// tetrahedron stores kInfinite in one slot and is oriented as if the
// infinite vertex were beyond its convex-hull facet.
//
// For point location and ray walking the space outside the hull is split
// into cones: the infinite tet over hull facet f covers the points beyond f
// that lie in the cone spanned by f from `apex`, a fixed point strictly
// inside the hull. With this convention every tetrahedron, finite or not,
// is a convex region bounded by four planes.
struct TetMesh {
  static constexpr VertexId kInfinite = std::numeric_limits<VertexId>::max();
  static constexpr TetId kNoTet = std::numeric_limits<TetId>::max();

  // Vertex order of the face opposite slot i, chosen so the opposite vertex
  // lies on the positive side of the face.
  static constexpr int kFace[4][3] = {{1, 3, 2}, {0, 2, 3}, {0, 3, 1}, {0, 1, 2}};

  std::vector<Vec3> vertices;
  std::vector<std::array<VertexId, 4>> tets;
  std::vector<std::array<TetId, 4>> neighbors;  // neighbors[t][i] is across the face opposite slot i
  std::vector<TetId> vertexTet;                 // one incident tet per vertex, kNoTet for duplicates
  std::vector<VertexId> duplicateOf;            // kInfinite unless the point repeats an earlier one
  Vec3 apex;

  std::size_t tetCount() const { return tets.size(); }
  bool isInfinite(TetId t) const { return infiniteSlot(t) >= 0; }
  int infiniteSlot(TetId t) const {
    for (int i = 0; i < 4; ++i)
      if (tets[t][i] == kInfinite) return i;
    return -1;
  }
  // Position used in geometric tests: the apex stands in for the infinite vertex.
  const Vec3& position(VertexId v) const { return v == kInfinite ? apex : vertices[v]; }
  std::array<VertexId, 3> face(TetId t, int i) const {
    return {tets[t][kFace[i][0]], tets[t][kFace[i][1]], tets[t][kFace[i][2]]};
  }
  // Sign that interior points produce for orient3d against face i.
  int innerSign(TetId t, int i) const {
    const int inf = infiniteSlot(t);
    return (inf < 0 || inf == i) ? 1 : -1;
  }
  // Exact side of q relative to face i: +1 inside half-space, -1 outside, 0 on the plane.
  int faceSide(TetId t, int i, const Vec3& q) const;
  int slotOf(TetId t, VertexId v) const {
    for (int i = 0; i < 4; ++i)
      if (tets[t][i] == v) return i;
    return -1;
  }
  int neighborSlot(TetId t, TetId n) const {
    for (int i = 0; i < 4; ++i)
      if (neighbors[t][i] == n) return i;
    return -1;
  }
  std::size_t finiteTetCount() const;
  double volume(TetId t) const;  // 0 for infinite tets

  // Every tet incident to v.
  std::vector<TetId> star(VertexId v) const;
};

// Bowyer-Watson insertion with walking point location and exact predicates.
// Throws Degenerate("degenerate input") when the points span less than 3D.
TetMesh tetrahedralize(const std::vector<Vec3>& points);
TetMesh tetrahedralize(const PointCloud& cloud);

// Returns a tet whose closed region contains the query (an infinite tet when
// the query lies outside the hull).
TetId locate(const TetMesh& mesh, const Vec3& query, TetId hint = 0);

struct FacetCrossing {
  TetId from = TetMesh::kNoTet;
  TetId to = TetMesh::kNoTet;
  int face = -1;          // slot in `from` opposite the crossed facet
  double t = 0;           // segment parameter, camera at 0, endpoint at 1
  double distanceToEnd = 0;
};

struct RayTraversal {
  std::vector<TetId> tets;               // camera side first
  std::vector<FacetCrossing> crossings;  // crossings[i] joins tets[i] and tets[i+1]
  TetId behind = TetMesh::kNoTet;        // first tet past the endpoint
};

// Walks the segment from `camera` to vertex `point`. `cameraTet`, when known,
// must contain the camera and saves the initial point location.
RayTraversal walkRay(const TetMesh& mesh, VertexId point, const Vec3& camera,
                     std::optional<TetId> cameraTet = std::nullopt);

// Adds uniform noise of the given amplitude; opt-in remedy for gridded or
// cospherical inputs.
std::vector<Vec3> jitterPoints(const std::vector<Vec3>& points, double amplitude, std::uint64_t seed);

}  // namespace vvgc
