#pragma once

#include "vvgc/core.hpp"

namespace vvgc::predicates {

// Sign of det[b-a, c-a, d-a]: positive when d lies on the side of (b-a)x(c-a).
// Exact for all double inputs: a floating-point filter decides the easy
// cases and rational arithmetic decides the rest.
int orient3d(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);

// Positive when e is strictly inside the circumsphere of (a,b,c,d), where
// orient3d(a,b,c,d) > 0. The sign flips for negatively oriented tetrahedra.
int insphere(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, const Vec3& e);

// Non-robust determinant values, for ordering crossings and volumes.
double orient3dValue(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);

// How often the exact fallback ran since process start (diagnostics only).
std::uint64_t exactFallbackCount();

}  // namespace vvgc::predicates
