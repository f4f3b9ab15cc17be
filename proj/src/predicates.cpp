#include "vvgc/predicates.hpp"

#include <atomic>
#include <cfloat>

#include <gmpxx.h>

namespace vvgc::predicates {
namespace {

constexpr double kEps = DBL_EPSILON * 0.5;
// Shewchuk's first-stage bounds, doubled; a looser filter only costs extra exact evaluations.
constexpr double kOrientBound = 2.0 * (7.0 + 56.0 * kEps) * kEps;
constexpr double kInsphereBound = 2.0 * (16.0 + 224.0 * kEps) * kEps;

std::atomic<std::uint64_t> gFallbacks{0};

int sign(const mpq_class& v) { return sgn(v); }

int orient3dExact(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  gFallbacks.fetch_add(1, std::memory_order_relaxed);
  const mpq_class bx = mpq_class(b.x) - a.x, by = mpq_class(b.y) - a.y, bz = mpq_class(b.z) - a.z;
  const mpq_class cx = mpq_class(c.x) - a.x, cy = mpq_class(c.y) - a.y, cz = mpq_class(c.z) - a.z;
  const mpq_class dx = mpq_class(d.x) - a.x, dy = mpq_class(d.y) - a.y, dz = mpq_class(d.z) - a.z;
  const mpq_class det = bx * (cy * dz - cz * dy) - by * (cx * dz - cz * dx) + bz * (cx * dy - cy * dx);
  return sign(det);
}

int insphereExact(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, const Vec3& e) {
  gFallbacks.fetch_add(1, std::memory_order_relaxed);
  auto row = [&](const Vec3& p) {
    std::array<mpq_class, 4> r{mpq_class(p.x) - e.x, mpq_class(p.y) - e.y, mpq_class(p.z) - e.z, 0};
    r[3] = r[0] * r[0] + r[1] * r[1] + r[2] * r[2];
    return r;
  };
  const auto ra = row(a), rb = row(b), rc = row(c), rd = row(d);
  auto det3 = [](const std::array<mpq_class, 4>& p, const std::array<mpq_class, 4>& q,
                 const std::array<mpq_class, 4>& r, int i, int j, int k) -> mpq_class {
    return p[i] * (q[j] * r[k] - q[k] * r[j]) - p[j] * (q[i] * r[k] - q[k] * r[i]) +
           p[k] * (q[i] * r[j] - q[j] * r[i]);
  };
  // Laplace expansion along the lift column.
  const mpq_class det = -ra[3] * det3(rb, rc, rd, 0, 1, 2) + rb[3] * det3(ra, rc, rd, 0, 1, 2) -
                        rc[3] * det3(ra, rb, rd, 0, 1, 2) + rd[3] * det3(ra, rb, rc, 0, 1, 2);
  // det is the 4x4 determinant |p-e, lift| of (a,b,c,d); it is negative for an
  // interior e when (a,b,c,d) is positively oriented under our convention.
  return -sign(det);
}

}  // namespace

double orient3dValue(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  const Vec3 u = b - a, v = c - a, w = d - a;
  return u.x * (v.y * w.z - v.z * w.y) - u.y * (v.x * w.z - v.z * w.x) + u.z * (v.x * w.y - v.y * w.x);
}

int orient3d(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  // Shewchuk layout (d as origin); his determinant is the negation of ours.
  const double adx = a.x - d.x, bdx = b.x - d.x, cdx = c.x - d.x;
  const double ady = a.y - d.y, bdy = b.y - d.y, cdy = c.y - d.y;
  const double adz = a.z - d.z, bdz = b.z - d.z, cdz = c.z - d.z;

  const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
  const double cdxady = cdx * ady, adxcdy = adx * cdy;
  const double adxbdy = adx * bdy, bdxady = bdx * ady;

  const double det = adz * (bdxcdy - cdxbdy) + bdz * (cdxady - adxcdy) + cdz * (adxbdy - bdxady);
  const double permanent = (std::fabs(bdxcdy) + std::fabs(cdxbdy)) * std::fabs(adz) +
                           (std::fabs(cdxady) + std::fabs(adxcdy)) * std::fabs(bdz) +
                           (std::fabs(adxbdy) + std::fabs(bdxady)) * std::fabs(cdz);
  const double bound = kOrientBound * permanent;
  if (det > bound) return -1;
  if (-det > bound) return 1;
  return orient3dExact(a, b, c, d);
}

int insphere(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, const Vec3& e) {
  const double aex = a.x - e.x, bex = b.x - e.x, cex = c.x - e.x, dex = d.x - e.x;
  const double aey = a.y - e.y, bey = b.y - e.y, cey = c.y - e.y, dey = d.y - e.y;
  const double aez = a.z - e.z, bez = b.z - e.z, cez = c.z - e.z, dez = d.z - e.z;

  const double aexbey = aex * bey, bexaey = bex * aey, ab = aexbey - bexaey;
  const double bexcey = bex * cey, cexbey = cex * bey, bc = bexcey - cexbey;
  const double cexdey = cex * dey, dexcey = dex * cey, cd = cexdey - dexcey;
  const double dexaey = dex * aey, aexdey = aex * dey, da = dexaey - aexdey;
  const double aexcey = aex * cey, cexaey = cex * aey, ac = aexcey - cexaey;
  const double bexdey = bex * dey, dexbey = dex * bey, bd = bexdey - dexbey;

  const double abc = aez * bc - bez * ac + cez * ab;
  const double bcd = bez * cd - cez * bd + dez * bc;
  const double cda = cez * da + dez * ac + aez * cd;
  const double dab = dez * ab + aez * bd + bez * da;

  const double alift = aex * aex + aey * aey + aez * aez;
  const double blift = bex * bex + bey * bey + bez * bez;
  const double clift = cex * cex + cey * cey + cez * cez;
  const double dlift = dex * dex + dey * dey + dez * dez;

  const double det = (dlift * abc - clift * dab) + (blift * cda - alift * bcd);

  const double permanent =
      ((std::fabs(cexdey) + std::fabs(dexcey)) * std::fabs(bez) +
       (std::fabs(dexbey) + std::fabs(bexdey)) * std::fabs(cez) +
       (std::fabs(bexcey) + std::fabs(cexbey)) * std::fabs(dez)) * alift +
      ((std::fabs(dexaey) + std::fabs(aexdey)) * std::fabs(cez) +
       (std::fabs(aexcey) + std::fabs(cexaey)) * std::fabs(dez) +
       (std::fabs(cexdey) + std::fabs(dexcey)) * std::fabs(aez)) * blift +
      ((std::fabs(aexbey) + std::fabs(bexaey)) * std::fabs(dez) +
       (std::fabs(bexdey) + std::fabs(dexbey)) * std::fabs(aez) +
       (std::fabs(dexaey) + std::fabs(aexdey)) * std::fabs(bez)) * clift +
      ((std::fabs(bexcey) + std::fabs(cexbey)) * std::fabs(aez) +
       (std::fabs(cexaey) + std::fabs(aexcey)) * std::fabs(bez) +
       (std::fabs(aexbey) + std::fabs(bexaey)) * std::fabs(cez)) * dlift;
  const double bound = kInsphereBound * permanent;
  // Shewchuk's insphere is positive inside for his positive orientation,
  // which is our negative one.
  if (det > bound) return -1;
  if (-det > bound) return 1;
  return insphereExact(a, b, c, d, e);
}

std::uint64_t exactFallbackCount() { return gFallbacks.load(std::memory_order_relaxed); }

}  // namespace vvgc::predicates
