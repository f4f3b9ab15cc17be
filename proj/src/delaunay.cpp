#include "vvgc/delaunay.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <unordered_map>

#include "vvgc/predicates.hpp"

namespace vvgc {
namespace {

constexpr VertexId kInf = TetMesh::kInfinite;
constexpr TetId kNone = TetMesh::kNoTet;

// splitmix64, used for the stochastic face order of the walks.
std::uint64_t nextRandom(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t edgeKey(VertexId a, VertexId b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

std::uint64_t mortonCode(const Vec3& p, const Aabb& box) {
  auto spread = [](std::uint64_t v) {
    v &= 0x1fffff;
    v = (v | v << 32) & 0x1f00000000ffffULL;
    v = (v | v << 16) & 0x1f0000ff0000ffULL;
    v = (v | v << 8) & 0x100f00f00f00f00fULL;
    v = (v | v << 4) & 0x10c30c30c30c30c3ULL;
    v = (v | v << 2) & 0x1249249249249249ULL;
    return v;
  };
  const Vec3 ext = box.extent();
  auto quant = [](double v, double lo, double len) -> std::uint64_t {
    if (!(len > 0)) return 0;
    const double u = std::clamp((v - lo) / len, 0.0, 1.0);
    return static_cast<std::uint64_t>(u * 2097151.0);
  };
  return spread(quant(p.x, box.min.x, ext.x)) | (spread(quant(p.y, box.min.y, ext.y)) << 1) |
         (spread(quant(p.z, box.min.z, ext.z)) << 2);
}

class Builder {
public:
  explicit Builder(TetMesh& mesh) : m_(mesh) {}

  void build();

private:
  TetId allocate(const std::array<VertexId, 4>& v) {
    TetId id;
    if (!free_.empty()) {
      id = free_.back();
      free_.pop_back();
      m_.tets[id] = v;
      m_.neighbors[id] = {kNone, kNone, kNone, kNone};
      dead_[id] = 0;
    } else {
      id = static_cast<TetId>(m_.tets.size());
      m_.tets.push_back(v);
      m_.neighbors.push_back({kNone, kNone, kNone, kNone});
      dead_.push_back(0);
      mark_.push_back(0);
    }
    return id;
  }

  bool inConflict(TetId t, const Vec3& p) const;
  std::array<VertexId, 4> initialSimplex() const;
  void linkAll(const std::vector<TetId>& ids);
  void insert(VertexId v);
  void compact();

  TetMesh& m_;
  std::vector<std::uint8_t> dead_;
  std::vector<std::uint32_t> mark_;
  std::uint32_t stamp_ = 0;
  std::vector<TetId> free_;
  TetId last_ = 0;

  // scratch
  std::vector<TetId> cavity_;
  struct Boundary {
    TetId tet;
    int slot;
  };
  std::vector<Boundary> boundary_;
  std::unordered_map<std::uint64_t, std::pair<TetId, int>> edges_;
};

bool Builder::inConflict(TetId t, const Vec3& p) const {
  const auto& v = m_.tets[t];
  const int inf = m_.infiniteSlot(t);
  if (inf < 0)
    return predicates::insphere(m_.vertices[v[0]], m_.vertices[v[1]], m_.vertices[v[2]], m_.vertices[v[3]], p) > 0;

  const auto f = m_.face(t, inf);
  const Vec3 &a = m_.vertices[f[0]], &b = m_.vertices[f[1]], &c = m_.vertices[f[2]];
  const int side = predicates::orient3d(a, b, c, p);
  if (side != 0) return side > 0;
  // On the hull plane: in conflict iff strictly inside the facet's circumcircle.
  // Any sphere through the facet cuts its plane in that circle, so borrow the
  // finite neighbor's opposite vertex (which lies on the negative side).
  const TetId n = m_.neighbors[t][inf];
  const VertexId q = m_.tets[n][m_.neighborSlot(n, t)];
  return predicates::insphere(a, b, c, m_.vertices[q], p) < 0;
}

std::array<VertexId, 4> Builder::initialSimplex() const {
  const auto& pts = m_.vertices;
  const std::size_t n = pts.size();
  if (n < 4) throw Error(ErrorKind::Degenerate, "degenerate input: fewer than 4 points");

  const VertexId i0 = 0;
  VertexId i1 = kInf;
  double best = 0;
  for (VertexId i = 1; i < n; ++i) {
    const double d = squaredNorm(pts[i] - pts[i0]);
    if (d > best) { best = d; i1 = i; }
  }
  if (i1 == kInf) throw Error(ErrorKind::Degenerate, "degenerate input: all points coincide");

  VertexId i2 = kInf;
  best = 0;
  for (VertexId i = 1; i < n; ++i) {
    const double d = squaredNorm(cross(pts[i1] - pts[i0], pts[i] - pts[i0]));
    if (d > best) { best = d; i2 = i; }
  }
  if (i2 == kInf) throw Error(ErrorKind::Degenerate, "degenerate input: points are collinear");

  VertexId i3 = kInf;
  best = 0;
  for (VertexId i = 1; i < n; ++i) {
    const double d = std::fabs(predicates::orient3dValue(pts[i0], pts[i1], pts[i2], pts[i]));
    if (d > best) { best = d; i3 = i; }
  }
  if (i3 == kInf || predicates::orient3d(pts[i0], pts[i1], pts[i2], pts[i3]) == 0) {
    i3 = kInf;
    for (VertexId i = 1; i < n && i3 == kInf; ++i)
      if (predicates::orient3d(pts[i0], pts[i1], pts[i2], pts[i]) != 0) i3 = i;
  }
  if (i3 == kInf) throw Error(ErrorKind::Degenerate, "degenerate input: points are coplanar");

  std::array<VertexId, 4> s{i0, i1, i2, i3};
  if (predicates::orient3d(pts[i0], pts[i1], pts[i2], pts[i3]) < 0) std::swap(s[2], s[3]);
  return s;
}

void Builder::linkAll(const std::vector<TetId>& ids) {
  std::unordered_map<std::uint64_t, std::vector<std::pair<TetId, int>>> byFace;
  auto key = [](std::array<VertexId, 3> f) {
    std::sort(f.begin(), f.end());
    // Vertex ids fit in 21 bits for the seed simplex (kInf handled explicitly).
    auto k = [](VertexId v) -> std::uint64_t { return v == kInf ? 0x1fffff : v; };
    return (k(f[0]) << 42) | (k(f[1]) << 21) | k(f[2]);
  };
  for (TetId t : ids)
    for (int i = 0; i < 4; ++i) byFace[key(m_.face(t, i))].push_back({t, i});
  for (auto& [k, list] : byFace) {
    if (list.size() != 2) continue;
    m_.neighbors[list[0].first][list[0].second] = list[1].first;
    m_.neighbors[list[1].first][list[1].second] = list[0].first;
  }
}

void Builder::insert(VertexId v) {
  const Vec3& p = m_.vertices[v];
  const TetId start = locate(m_, p, last_);

  for (VertexId w : m_.tets[start])
    if (w != kInf && m_.vertices[w] == p) {
      m_.duplicateOf[v] = w;
      return;
    }

  if (!inConflict(start, p)) throw Error(ErrorKind::Degenerate, "delaunay: located tet not in conflict");

  ++stamp_;
  cavity_.clear();
  cavity_.push_back(start);
  mark_[start] = stamp_;
  for (std::size_t k = 0; k < cavity_.size(); ++k) {
    const TetId t = cavity_[k];
    for (int i = 0; i < 4; ++i) {
      const TetId n = m_.neighbors[t][i];
      if (mark_[n] == stamp_) continue;
      if (inConflict(n, p)) {
        mark_[n] = stamp_;
        cavity_.push_back(n);
      }
    }
  }

  // Every boundary facet must see p from the cavity side; absorb the outer
  // tet otherwise. Only reachable on cocircular ties.
  for (bool repaired = true; repaired;) {
    repaired = false;
    boundary_.clear();
    for (std::size_t k = 0; k < cavity_.size() && !repaired; ++k) {
      const TetId t = cavity_[k];
      for (int i = 0; i < 4; ++i) {
        const TetId n = m_.neighbors[t][i];
        if (mark_[n] == stamp_) continue;
        if (m_.faceSide(t, i, p) <= 0) {
          mark_[n] = stamp_;
          cavity_.push_back(n);
          repaired = true;
          break;
        }
        boundary_.push_back({t, i});
      }
    }
  }

  struct NewTet {
    std::array<VertexId, 4> v;
    TetId outside;
    int outsideSlot;
  };
  std::vector<NewTet> pending;
  pending.reserve(boundary_.size());
  for (const Boundary& b : boundary_) {
    auto verts = m_.tets[b.tet];
    verts[b.slot] = v;
    const TetId out = m_.neighbors[b.tet][b.slot];
    pending.push_back({verts, out, m_.neighborSlot(out, b.tet)});
  }
  for (TetId t : cavity_) {
    dead_[t] = 1;
    free_.push_back(t);
  }

  edges_.clear();
  for (const NewTet& nt : pending) {
    const TetId id = allocate(nt.v);
    mark_[id] = 0;
    const int pSlot = std::find(nt.v.begin(), nt.v.end(), v) - nt.v.begin();
    m_.neighbors[id][pSlot] = nt.outside;
    m_.neighbors[nt.outside][nt.outsideSlot] = id;
    for (int j = 0; j < 4; ++j) {
      if (j == pSlot) continue;
      VertexId e[2];
      int c = 0;
      for (int s = 0; s < 4; ++s)
        if (s != j && s != pSlot) e[c++] = nt.v[s];
      const auto key = edgeKey(e[0], e[1]);
      auto it = edges_.find(key);
      if (it == edges_.end()) {
        edges_.emplace(key, std::make_pair(id, j));
      } else {
        m_.neighbors[id][j] = it->second.first;
        m_.neighbors[it->second.first][it->second.second] = id;
        edges_.erase(it);
      }
    }
    for (VertexId w : nt.v)
      if (w != kInf) m_.vertexTet[w] = id;
    last_ = id;
  }
}

void Builder::compact() {
  std::vector<TetId> remap(m_.tets.size(), kNone);
  TetId next = 0;
  for (TetId t = 0; t < m_.tets.size(); ++t)
    if (!dead_[t]) remap[t] = next++;
  std::vector<std::array<VertexId, 4>> tets(next);
  std::vector<std::array<TetId, 4>> nbrs(next);
  for (TetId t = 0; t < m_.tets.size(); ++t) {
    if (dead_[t]) continue;
    tets[remap[t]] = m_.tets[t];
    for (int i = 0; i < 4; ++i) nbrs[remap[t]][i] = remap[m_.neighbors[t][i]];
  }
  m_.tets = std::move(tets);
  m_.neighbors = std::move(nbrs);
  for (auto& t : m_.vertexTet)
    if (t != kNone) t = remap[t];
}

void Builder::build() {
  const std::size_t n = m_.vertices.size();
  m_.vertexTet.assign(n, kNone);
  m_.duplicateOf.assign(n, kInf);

  const auto s = initialSimplex();
  const auto& pts = m_.vertices;
  m_.apex = (pts[s[0]] + pts[s[1]] + pts[s[2]] + pts[s[3]]) * 0.25;

  std::vector<TetId> ids{allocate(s)};
  for (int i = 0; i < 4; ++i) {
    // Reverse the face so the infinite vertex sits on its positive side.
    const auto f = m_.face(ids[0], i);
    ids.push_back(allocate({f[0], f[2], f[1], kInf}));
  }
  linkAll(ids);
  for (VertexId w : s) m_.vertexTet[w] = ids[0];
  last_ = ids[0];

  std::vector<VertexId> order;
  order.reserve(n);
  for (VertexId i = 0; i < n; ++i)
    if (std::find(s.begin(), s.end(), i) == s.end()) order.push_back(i);
  const Aabb box = computeAabb(m_.vertices);
  std::vector<std::uint64_t> codes(n);
  for (VertexId i : order) codes[i] = mortonCode(pts[i], box);
  std::stable_sort(order.begin(), order.end(), [&](VertexId a, VertexId b) { return codes[a] < codes[b]; });

  for (VertexId v : order) insert(v);
  compact();
}

}  // namespace

int TetMesh::faceSide(TetId t, int i, const Vec3& q) const {
  const auto f = face(t, i);
  return predicates::orient3d(position(f[0]), position(f[1]), position(f[2]), q) * innerSign(t, i);
}

std::size_t TetMesh::finiteTetCount() const {
  std::size_t c = 0;
  for (TetId t = 0; t < tets.size(); ++t) c += isInfinite(t) ? 0 : 1;
  return c;
}

double TetMesh::volume(TetId t) const {
  if (isInfinite(t)) return 0;
  const auto& v = tets[t];
  return predicates::orient3dValue(vertices[v[0]], vertices[v[1]], vertices[v[2]], vertices[v[3]]) / 6.0;
}

std::vector<TetId> TetMesh::star(VertexId v) const {
  std::vector<TetId> out;
  if (v != kInfinite && duplicateOf[v] != kInfinite) v = duplicateOf[v];
  const TetId seed = vertexTet[v];
  if (seed == kNoTet) return out;
  out.push_back(seed);
  for (std::size_t k = 0; k < out.size(); ++k) {
    const TetId t = out[k];
    const int vs = slotOf(t, v);
    for (int i = 0; i < 4; ++i) {
      if (i == vs) continue;
      const TetId n = neighbors[t][i];
      if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
    }
  }
  return out;
}

TetMesh tetrahedralize(const std::vector<Vec3>& points) {
  TetMesh mesh;
  mesh.vertices = points;
  for (const Vec3& p : points)
    if (!isFinite(p)) throw Error(ErrorKind::BadInput, "non-finite coordinate in tetrahedralization input");
  Builder(mesh).build();
  return mesh;
}

TetMesh tetrahedralize(const PointCloud& cloud) { return tetrahedralize(cloud.positions); }

TetId locate(const TetMesh& mesh, const Vec3& query, TetId hint) {
  const std::size_t count = mesh.tets.size();
  TetId cur = hint < count ? hint : 0;
  TetId prev = kNone;
  std::uint64_t rng = 0x5eed;
  const std::size_t maxSteps = 4 * count + 64;
  for (std::size_t step = 0; step < maxSteps; ++step) {
    const int first = static_cast<int>(nextRandom(rng) & 3);
    bool moved = false;
    for (int k = 0; k < 4; ++k) {
      const int i = (first + k) & 3;
      const TetId n = mesh.neighbors[cur][i];
      if (n == prev) continue;
      if (mesh.faceSide(cur, i, query) < 0) {
        prev = cur;
        cur = n;
        moved = true;
        break;
      }
    }
    if (!moved) return cur;
  }
  // The stochastic walk terminates with probability one; a scan is the backstop.
  for (TetId t = 0; t < count; ++t) {
    bool inside = true;
    for (int i = 0; i < 4 && inside; ++i) inside = mesh.faceSide(t, i, query) >= 0;
    if (inside) return t;
  }
  throw Error(ErrorKind::Degenerate, "point location failed");
}

namespace {

bool tryWalk(const TetMesh& mesh, VertexId point, const Vec3& camera, TetId start, RayTraversal& out) {
  const Vec3& end = mesh.vertices[point];
  const double length = distance(camera, end);
  out = RayTraversal{};

  TetId cur = start;
  double lastT = 0;
  const std::size_t maxSteps = mesh.tets.size() + 16;
  for (std::size_t step = 0;; ++step) {
    out.tets.push_back(cur);
    if (mesh.slotOf(cur, point) >= 0) break;
    if (step > maxSteps) return false;

    // Leave through the first plane that separates the cell from the endpoint.
    int exitFace = -1;
    double exitT = 0;
    for (int i = 0; i < 4; ++i) {
      if (mesh.faceSide(cur, i, end) >= 0) continue;
      const auto f = mesh.face(cur, i);
      const Vec3 &a = mesh.position(f[0]), &b = mesh.position(f[1]), &c = mesh.position(f[2]);
      const double oc = predicates::orient3dValue(a, b, c, camera);
      const double oe = predicates::orient3dValue(a, b, c, end);
      double t = 0;
      if (oc != oe) t = oc / (oc - oe);
      if (!(t >= 0)) t = 0;
      if (t > 1) t = 1;
      if (exitFace < 0 || t < exitT) {
        exitFace = i;
        exitT = t;
      }
    }
    if (exitFace < 0) return false;
    exitT = std::max(exitT, lastT);
    lastT = exitT;
    const TetId next = mesh.neighbors[cur][exitFace];
    out.crossings.push_back({cur, next, exitFace, exitT, (1.0 - exitT) * length});
    cur = next;
  }

  // T_{M+1}: the tet of the endpoint's star entered by the ray's extension.
  const Vec3 beyond = end + (end - camera);
  TetId weak = kNone;
  for (TetId t : mesh.star(point)) {
    const int ps = mesh.slotOf(t, point);
    int worst = 1;
    for (int i = 0; i < 4; ++i) {
      if (i == ps) continue;
      worst = std::min(worst, mesh.faceSide(t, i, beyond));
    }
    if (worst > 0) {
      out.behind = t;
      return true;
    }
    if (worst == 0 && weak == kNone) weak = t;
  }
  if (weak == kNone) return false;
  out.behind = weak;
  return true;
}

}  // namespace

RayTraversal walkRay(const TetMesh& mesh, VertexId point, const Vec3& camera, std::optional<TetId> cameraTet) {
  if (point >= mesh.vertices.size()) throw Error(ErrorKind::BadInput, "walk_ray: point index out of range");
  if (mesh.duplicateOf[point] != TetMesh::kInfinite) point = mesh.duplicateOf[point];
  const Vec3& end = mesh.vertices[point];
  if (camera == end) throw Error(ErrorKind::BadInput, "walk_ray: camera coincides with endpoint");

  RayTraversal out;
  TetId start = cameraTet ? *cameraTet : locate(mesh, camera, mesh.vertexTet[point]);
  if (tryWalk(mesh, point, camera, start, out)) return out;

  // Deterministic perturbation of the camera for rays through degenerate features.
  const double length = distance(camera, end);
  std::uint64_t rng = 0xc0ffee ^ point;
  for (int attempt = 1; attempt <= 8; ++attempt) {
    const double scale = length * 1e-9 * std::pow(10.0, attempt);
    const Vec3 shift{static_cast<double>(nextRandom(rng) >> 11) / 9007199254740992.0 - 0.5,
                     static_cast<double>(nextRandom(rng) >> 11) / 9007199254740992.0 - 0.5,
                     static_cast<double>(nextRandom(rng) >> 11) / 9007199254740992.0 - 0.5};
    const Vec3 moved = camera + shift * scale;
    start = locate(mesh, moved, start);
    if (tryWalk(mesh, point, moved, start, out)) return out;
  }
  throw Error(ErrorKind::Degenerate, "walk_ray: traversal failed for point " + std::to_string(point));
}

std::vector<Vec3> jitterPoints(const std::vector<Vec3>& points, double amplitude, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  std::vector<Vec3> out;
  out.reserve(points.size());
  for (const Vec3& p : points) out.push_back({p.x + u(rng), p.y + u(rng), p.z + u(rng)});
  return out;
}

}  // namespace vvgc
