#include "vvgc/viewgen.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"

namespace vvgc {

using nlohmann::json;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

Vec3 toVec(const json& j, const char* key) {
  const json& a = j.at(key);
  if (!a.is_array() || a.size() != 3) throw Error(ErrorKind::BadInput, std::string("view field '") + key + "' must be [x,y,z]");
  return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

Mat3 multiply(const Mat3& a, const Mat3& b) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j) + a(i, 2) * b(2, j);
  return r;
}

double orthoError(const Mat3& r) {
  const Mat3 p = multiply(r.transposed(), r);
  double e = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) e = std::max(e, std::fabs(p(i, j) - (i == j ? 1.0 : 0.0)));
  return e;
}

// Nearest rotation by Newton iteration on the polar decomposition.
Mat3 orthonormalize(Mat3 r) {
  for (int it = 0; it < 20; ++it) {
    const double det = r.determinant();
    Mat3 invT;  // inverse transpose = cofactor matrix / det
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const int i1 = (i + 1) % 3, i2 = (i + 2) % 3, j1 = (j + 1) % 3, j2 = (j + 2) % 3;
        invT(i, j) = (r(i1, j1) * r(i2, j2) - r(i1, j2) * r(i2, j1)) / det;
      }
    for (int k = 0; k < 9; ++k) r.m[k] = 0.5 * (r.m[k] + invT.m[k]);
    if (orthoError(r) < 1e-15) break;
  }
  return r;
}

Intrinsics readIntrinsics(const json& v) {
  Intrinsics in = defaultIntrinsics();
  in.width = v.value("width", in.width);
  in.height = v.value("height", in.height);
  if (!v.contains("fx") && (in.width != 256 || in.height != 256)) in = defaultIntrinsics(in.width, in.height);
  in.fx = v.value("fx", in.fx);
  in.fy = v.value("fy", in.fy);
  in.cx = v.value("cx", in.cx);
  in.cy = v.value("cy", in.cy);
  if (!(in.fx > 0 && in.fy > 0) || in.width <= 0 || in.height <= 0 || in.cx < 0 || in.cx >= in.width ||
      in.cy < 0 || in.cy >= in.height)
    throw Error(ErrorKind::BadInput, "invalid intrinsics");
  return in;
}

}  // namespace

Mat3 Mat3::transposed() const {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
  return r;
}

Vec3 Mat3::transposedTimes(const Vec3& v) const { return row(0) * v.x + row(1) * v.y + row(2) * v.z; }

double Mat3::determinant() const { return dot(row(0), cross(row(1), row(2))); }

Intrinsics defaultIntrinsics(int width, int height, double vfovDeg) {
  Intrinsics in;
  in.width = width;
  in.height = height;
  in.fy = 0.5 * height / std::tan(0.5 * vfovDeg * kDeg);
  in.fx = in.fy;
  in.cx = 0.5 * width;
  in.cy = 0.5 * height;
  return in;
}

RigidPose lookAt(const Vec3& eye, const Vec3& target, const Vec3& up) {
  const Vec3 f = target - eye;
  const double fl = norm(f), ul = norm(up);
  if (!(fl > 0) || !(ul > 0)) throw Error(ErrorKind::BadInput, "degenerate look-at");
  const Vec3 z = f / fl;
  const Vec3 side = cross(z, up / ul);
  if (norm(side) < 1e-9) throw Error(ErrorKind::BadInput, "degenerate look-at");
  // y = -up projected orthogonally to z, so image rows grow downward.
  const Vec3 x = normalized(side);
  const Vec3 y = cross(z, x);
  RigidPose p;
  p.rotation.m = {x.x, x.y, x.z, y.x, y.y, y.z, z.x, z.y, z.z};
  p.translation = -(p.rotation * eye);
  return p;
}

VirtualView viewToNormalized(const VirtualView& view, const NormTransform& t) {
  VirtualView v = view;
  const Vec3 c = t.invert(view.pose.center());
  v.pose.translation = -(v.pose.rotation * c);
  return v;
}

std::vector<VirtualView> sampleSpherical(const Aabb& bbox, int nAzimuth, int nElevation, double radiusFactor,
                                         const Intrinsics& intr) {
  if (nAzimuth < 1 || nElevation < 1) throw Error(ErrorKind::BadInput, "view counts must be positive");
  if (!(radiusFactor > 0.5)) throw Error(ErrorKind::BadInput, "radius factor must exceed 0.5");
  const Vec3 c = bbox.center();
  const double r = radiusFactor * bbox.diagonal();
  std::vector<VirtualView> views;
  for (int e = 0; e < nElevation; ++e) {
    const double el = (-75.0 + 150.0 * (e + 0.5) / nElevation) * kDeg;
    for (int a = 0; a < nAzimuth; ++a) {
      const double az = 360.0 * a / nAzimuth * kDeg;
      const Vec3 eye = c + Vec3{std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)} * r;
      views.push_back({lookAt(eye, c, {0, 0, 1}), intr, static_cast<int>(views.size())});
    }
  }
  return views;
}

void addPolarViews(std::vector<VirtualView>& views, const Aabb& bbox, double radiusFactor, const Intrinsics& intr) {
  if (!(radiusFactor > 0.5)) throw Error(ErrorKind::BadInput, "radius factor must exceed 0.5");
  const Vec3 c = bbox.center();
  const double r = radiusFactor * bbox.diagonal();
  for (double el : {85.0, -85.0}) {
    const double e = el * kDeg;
    const Vec3 eye = c + Vec3{std::cos(e), 0, std::sin(e)} * r;
    views.push_back({lookAt(eye, c, {0, 0, 1}), intr, static_cast<int>(views.size())});
  }
}

std::vector<VirtualView> defaultSphericalViews(const Aabb& bbox, double radiusFactor, const Intrinsics& intr) {
  auto views = sampleSpherical(bbox, 8, 3, radiusFactor, intr);
  addPolarViews(views, bbox, radiusFactor, intr);
  return views;
}

namespace {

std::vector<Vec3> gridNodes(const Aabb& bbox, double heightAgl, double overlap, const Intrinsics& intr) {
  if (!(heightAgl > 0)) throw Error(ErrorKind::BadInput, "height above ground must be positive");
  if (!(overlap >= 0 && overlap <= 0.95)) throw Error(ErrorKind::BadInput, "overlap must lie in [0, 0.95]");
  const double footprint = heightAgl * intr.width / intr.fx;
  const double step = footprint * (1.0 - overlap);
  const Vec3 ext = bbox.extent(), c = bbox.center();
  const int nx = static_cast<int>(std::ceil(ext.x / step)) + 1;
  const int ny = static_cast<int>(std::ceil(ext.y / step)) + 1;
  const double z = bbox.max.z + heightAgl;
  std::vector<Vec3> nodes;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      nodes.push_back({c.x + (i - 0.5 * (nx - 1)) * step, c.y + (j - 0.5 * (ny - 1)) * step, z});
  return nodes;
}

}  // namespace

std::vector<VirtualView> sampleGridNadir(const Aabb& bbox, double heightAgl, double overlap, const Intrinsics& intr) {
  std::vector<VirtualView> views;
  for (const Vec3& e : gridNodes(bbox, heightAgl, overlap, intr))
    views.push_back({lookAt(e, e - Vec3{0, 0, 1}, {0, 1, 0}), intr, static_cast<int>(views.size())});
  return views;
}

std::vector<VirtualView> sampleGridOblique(const Aabb& bbox, double heightAgl, double overlap, double tiltDeg,
                                           const Intrinsics& intr) {
  if (!(tiltDeg > 0 && tiltDeg < 90)) throw Error(ErrorKind::BadInput, "tilt must lie in (0, 90) degrees");
  const double s = std::sin(tiltDeg * kDeg), c = std::cos(tiltDeg * kDeg);
  const Vec3 dirs[5] = {{0, 0, -1}, {s, 0, -c}, {-s, 0, -c}, {0, s, -c}, {0, -s, -c}};
  std::vector<VirtualView> views;
  for (const Vec3& e : gridNodes(bbox, heightAgl, overlap, intr))
    for (const Vec3& d : dirs) {
      const Vec3 up = d.y != 0 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
      views.push_back({lookAt(e, e + d, up), intr, static_cast<int>(views.size())});
    }
  return views;
}

std::vector<VirtualView> parseViews(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::BadInput, std::string("view list parse error: ") + e.what());
  }
  if (!doc.contains("views") || !doc["views"].is_array()) throw Error(ErrorKind::BadInput, "view list needs a 'views' array");
  std::vector<VirtualView> views;
  try {
    for (const json& v : doc["views"]) {
      VirtualView view;
      view.id = static_cast<int>(views.size());
      view.intr = readIntrinsics(v);
      if (v.contains("rotation")) {
        const json& r = v.at("rotation");
        if (!r.is_array() || r.size() != 9) throw Error(ErrorKind::BadInput, "rotation must hold 9 numbers");
        for (int k = 0; k < 9; ++k) view.pose.rotation.m[k] = r[k].get<double>();
        const double err = orthoError(view.pose.rotation);
        if (err > 1e-3 || !(view.pose.rotation.determinant() > 0))
          throw Error(ErrorKind::BadInput, "rotation of view " + std::to_string(view.id) + " is not orthonormal");
        if (err > 0) view.pose.rotation = orthonormalize(view.pose.rotation);
        view.pose.translation = toVec(v, "translation");
      } else {
        view.pose = lookAt(toVec(v, "eye"), toVec(v, "target"), toVec(v, "up"));
      }
      views.push_back(view);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::BadInput, std::string("view list: ") + e.what());
  }
  if (views.empty()) throw Error(ErrorKind::BadInput, "no views");
  return views;
}

std::vector<VirtualView> loadCustomViews(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open view list " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parseViews(ss.str());
}

std::string viewsToJson(const std::vector<VirtualView>& views) {
  json arr = json::array();
  for (const VirtualView& v : views) {
    const Vec3 t = v.pose.translation;
    arr.push_back({{"id", v.id},
                   {"rotation", v.pose.rotation.m},
                   {"translation", {t.x, t.y, t.z}},
                   {"fx", v.intr.fx},
                   {"fy", v.intr.fy},
                   {"cx", v.intr.cx},
                   {"cy", v.intr.cy},
                   {"width", v.intr.width},
                   {"height", v.intr.height}});
  }
  return json{{"views", arr}}.dump(1);
}

void saveViews(const std::string& path, const std::vector<VirtualView>& views) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write view list " + path);
  out << viewsToJson(views) << '\n';
  if (!out) throw Error(ErrorKind::Io, "cannot write view list " + path);
}

}  // namespace vvgc
