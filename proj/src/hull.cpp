#include "vvgc/hull.hpp"

#include <cmath>
#include <unordered_map>

#include "vvgc/predicates.hpp"

namespace vvgc {
namespace {

struct Face {
  explicit Face(std::array<std::uint32_t, 3> verts) : v(verts) {}

  std::array<std::uint32_t, 3> v;
  std::array<int, 3> adj{-1, -1, -1};  // adj[k] shares edge (v[k], v[k+1])
  std::vector<std::uint32_t> outside;
  bool alive = true;
  bool visible = false;
};

class HullBuilder {
public:
  explicit HullBuilder(const std::vector<Vec3>& pts) : p_(pts) {}

  ConvexHull run() {
    std::array<std::uint32_t, 4> s = initialSimplex();
    static constexpr int kOut[4][3] = {{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}};
    for (const auto& f : kOut) faces_.emplace_back(std::array<std::uint32_t, 3>{s[f[0]], s[f[1]], s[f[2]]});
    linkInitial();
    std::vector<std::uint32_t> rest;
    for (std::uint32_t i = 0; i < p_.size(); ++i)
      if (i != s[0] && i != s[1] && i != s[2] && i != s[3]) rest.push_back(i);
    assign(rest, 0);

    for (std::size_t fi = 0; fi < faces_.size(); ++fi) {
      while (faces_[fi].alive && !faces_[fi].outside.empty()) addPoint(fi);
    }

    ConvexHull hull;
    hull.isVertex.assign(p_.size(), false);
    for (const Face& f : faces_) {
      if (!f.alive) continue;
      hull.faces.push_back(f.v);
      for (std::uint32_t v : f.v) hull.isVertex[v] = true;
    }
    return hull;
  }

private:
  int side(const Face& f, std::uint32_t q) const { return predicates::orient3d(p_[f.v[0]], p_[f.v[1]], p_[f.v[2]], p_[q]); }

  std::array<std::uint32_t, 4> initialSimplex() const {
    if (p_.size() < 4) throw Error(ErrorKind::Degenerate, "degenerate input: fewer than 4 points");
    std::uint32_t a = 0;
    for (std::uint32_t i = 1; i < p_.size(); ++i)
      if (p_[i].x < p_[a].x) a = i;
    std::uint32_t b = a;
    double best = 0;
    for (std::uint32_t i = 0; i < p_.size(); ++i)
      if (const double d = squaredNorm(p_[i] - p_[a]); d > best) best = d, b = i;
    if (b == a) throw Error(ErrorKind::Degenerate, "degenerate input: all points coincide");
    std::uint32_t c = a;
    best = 0;
    for (std::uint32_t i = 0; i < p_.size(); ++i)
      if (const double d = squaredNorm(cross(p_[b] - p_[a], p_[i] - p_[a])); d > best) best = d, c = i;
    if (c == a) throw Error(ErrorKind::Degenerate, "degenerate input: points are collinear");
    std::uint32_t d = a;
    best = 0;
    for (std::uint32_t i = 0; i < p_.size(); ++i)
      if (const double o = std::fabs(predicates::orient3dValue(p_[a], p_[b], p_[c], p_[i])); o > best) best = o, d = i;
    int o = d == a ? 0 : predicates::orient3d(p_[a], p_[b], p_[c], p_[d]);
    if (o == 0) {
      // The float scan can miss a tiny exact offset; fall back to an exact scan.
      for (std::uint32_t i = 0; i < p_.size() && o == 0; ++i)
        if ((o = predicates::orient3d(p_[a], p_[b], p_[c], p_[i])) != 0) d = i;
    }
    if (o == 0) throw Error(ErrorKind::Degenerate, "degenerate input: points are coplanar");
    return o > 0 ? std::array<std::uint32_t, 4>{a, b, c, d} : std::array<std::uint32_t, 4>{a, c, b, d};
  }

  static std::uint64_t edgeKey(std::uint32_t a, std::uint32_t b) { return (std::uint64_t(a) << 32) | b; }

  void linkInitial() {
    std::unordered_map<std::uint64_t, int> owner;
    for (int f = 0; f < 4; ++f)
      for (int k = 0; k < 3; ++k) owner[edgeKey(faces_[f].v[k], faces_[f].v[(k + 1) % 3])] = f;
    for (int f = 0; f < 4; ++f)
      for (int k = 0; k < 3; ++k) faces_[f].adj[k] = owner.at(edgeKey(faces_[f].v[(k + 1) % 3], faces_[f].v[k]));
  }

  void assign(const std::vector<std::uint32_t>& pts, std::size_t firstFace) {
    for (std::uint32_t q : pts)
      for (std::size_t f = firstFace; f < faces_.size(); ++f)
        if (faces_[f].alive && side(faces_[f], q) > 0) {
          faces_[f].outside.push_back(q);
          break;
        }
  }

  void addPoint(std::size_t fi) {
    Face& start = faces_[fi];
    std::uint32_t eye = start.outside.front();
    double far = -1;
    for (std::uint32_t q : start.outside) {
      const double d = predicates::orient3dValue(p_[start.v[0]], p_[start.v[1]], p_[start.v[2]], p_[q]);
      if (d > far) far = d, eye = q;
    }

    std::vector<int> visible{static_cast<int>(fi)};
    faces_[fi].visible = true;
    for (std::size_t k = 0; k < visible.size(); ++k)
      for (int n : faces_[visible[k]].adj)
        if (!faces_[n].visible && side(faces_[n], eye) > 0) {
          faces_[n].visible = true;
          visible.push_back(n);
        }

    struct Horizon {
      std::uint32_t a, b;
      int outer;
    };
    std::vector<Horizon> horizon;
    for (int f : visible)
      for (int k = 0; k < 3; ++k) {
        const int n = faces_[f].adj[k];
        if (!faces_[n].visible) horizon.push_back({faces_[f].v[k], faces_[f].v[(k + 1) % 3], n});
      }

    const std::size_t firstNew = faces_.size();
    std::unordered_map<std::uint32_t, int> byStart, byEnd;
    for (const Horizon& h : horizon) {
      const int nf = static_cast<int>(faces_.size());
      Face f({h.a, h.b, eye});
      f.adj[0] = h.outer;
      Face& outer = faces_[h.outer];
      for (int k = 0; k < 3; ++k)
        if (outer.v[k] == h.b && outer.v[(k + 1) % 3] == h.a) outer.adj[k] = nf;
      faces_.push_back(std::move(f));
      byStart[h.a] = nf;
      byEnd[h.b] = nf;
    }
    for (std::size_t nf = firstNew; nf < faces_.size(); ++nf) {
      faces_[nf].adj[1] = byStart.at(faces_[nf].v[1]);
      faces_[nf].adj[2] = byEnd.at(faces_[nf].v[0]);
    }

    std::vector<std::uint32_t> orphans;
    for (int f : visible) {
      faces_[f].alive = false;
      for (std::uint32_t q : faces_[f].outside)
        if (q != eye) orphans.push_back(q);
      faces_[f].outside.clear();
      faces_[f].outside.shrink_to_fit();
    }
    assign(orphans, firstNew);
  }

  const std::vector<Vec3>& p_;
  std::vector<Face> faces_;
};

}  // namespace

ConvexHull convexHull(const std::vector<Vec3>& points) { return HullBuilder(points).run(); }

}  // namespace vvgc
