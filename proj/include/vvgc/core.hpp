#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace vvgc {

// Error categories map one-to-one onto CLI exit codes.
enum class ErrorKind { BadInput = 2, Degenerate = 3, Io = 4 };

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

struct Vec3 {
  double x = 0, y = 0, z = 0;

  constexpr Vec3() = default;
  constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
  constexpr bool operator==(const Vec3&) const = default;
};

inline constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }
inline constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline double squaredNorm(const Vec3& v) { return dot(v, v); }
inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }
inline Vec3 normalized(const Vec3& v) { return v / norm(v); }
inline bool isFinite(const Vec3& v) { return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z); }

using Color = std::array<std::uint8_t, 3>;

// Input samples. Indices 0..n-1 are stable identities used by every later stage.
struct PointCloud {
  std::vector<Vec3> positions;
  std::vector<Color> colors;  // empty, or one per position

  std::size_t size() const { return positions.size(); }
  bool empty() const { return positions.empty(); }
  const Vec3& operator[](std::size_t i) const { return positions[i]; }
};

// Oriented triangles; the normal (b-a)x(c-a) points outward.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;

  bool empty() const { return triangles.empty(); }
  double area() const;
  Vec3 flux() const;            // sum of area-weighted normals
  double signedVolume() const;  // divergence theorem
};

struct Aabb {
  Vec3 min, max;

  Vec3 center() const { return (min + max) * 0.5; }
  Vec3 extent() const { return max - min; }
  double diagonal() const { return norm(max - min); }
  bool contains(const Vec3& p) const {
    return p.x >= min.x && p.y >= min.y && p.z >= min.z && p.x <= max.x && p.y <= max.y && p.z <= max.z;
  }
};

// Maps normalized coordinates back to the original frame: original = normalized * scale + translation.
struct NormTransform {
  Vec3 translation;
  double scale = 1.0;

  Vec3 apply(const Vec3& normalizedPoint) const { return normalizedPoint * scale + translation; }
  Vec3 invert(const Vec3& originalPoint) const { return (originalPoint - translation) / scale; }
};

Aabb computeAabb(const std::vector<Vec3>& points);
Aabb computeAabb(const PointCloud& cloud);

// Centers the cloud on its box center and scales it to unit box diagonal.
std::pair<PointCloud, NormTransform> normalizeCloud(const PointCloud& cloud);

// Throws BadInput when any coordinate is NaN or infinite.
void validateCloud(const PointCloud& cloud);

}  // namespace vvgc
