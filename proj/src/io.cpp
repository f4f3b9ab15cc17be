#include "vvgc/io.hpp"

#include <algorithm>
#include <bit>
#include <cfloat>
#include <cstring>
#include <fstream>
#include <sstream>

namespace vvgc {
namespace {

static_assert(std::endian::native == std::endian::little, "byte order handling assumes a little-endian host");

template <typename T>
T byteswap(T v) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  std::reverse(b, b + sizeof(T));
  std::memcpy(&v, b, sizeof(T));
  return v;
}

std::ifstream openIn(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  return in;
}

std::ofstream openOut(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "write failed: " + path);
}

template <typename T>
void putLe(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T getLe(std::istream& in, const std::string& path) {
  T v;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) throw Error(ErrorKind::Io, "truncated file " + path);
  return v;
}

// ---- PLY ----

enum class PType { I8, U8, I16, U16, I32, U32, F32, F64 };

PType parseType(const std::string& t, const std::string& path) {
  if (t == "char" || t == "int8") return PType::I8;
  if (t == "uchar" || t == "uint8") return PType::U8;
  if (t == "short" || t == "int16") return PType::I16;
  if (t == "ushort" || t == "uint16") return PType::U16;
  if (t == "int" || t == "int32") return PType::I32;
  if (t == "uint" || t == "uint32") return PType::U32;
  if (t == "float" || t == "float32") return PType::F32;
  if (t == "double" || t == "float64") return PType::F64;
  throw Error(ErrorKind::BadInput, "unknown PLY property type '" + t + "' in " + path);
}

struct PlyProperty {
  std::string name;
  PType type = PType::F32;
  bool isList = false;
  PType countType = PType::U8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> props;
};

class PlyValueReader {
public:
  PlyValueReader(std::istream& in, const std::string& path, bool ascii, bool swap)
      : in_(in), path_(path), ascii_(ascii), swap_(swap) {}

  double read(PType t) {
    if (ascii_) {
      double v;
      if (!(in_ >> v)) throw Error(ErrorKind::BadInput, "malformed PLY body in " + path_);
      return v;
    }
    switch (t) {
      case PType::I8: return get<std::int8_t>();
      case PType::U8: return get<std::uint8_t>();
      case PType::I16: return get<std::int16_t>();
      case PType::U16: return get<std::uint16_t>();
      case PType::I32: return get<std::int32_t>();
      case PType::U32: return get<std::uint32_t>();
      case PType::F32: return get<float>();
      case PType::F64: return get<double>();
    }
    return 0;
  }

private:
  template <typename T>
  T get() {
    T v = getLe<T>(in_, path_);
    return swap_ ? byteswap(v) : v;
  }

  std::istream& in_;
  const std::string& path_;
  bool ascii_, swap_;
};

}  // namespace

PlyData readPly(const std::string& path) {
  std::ifstream in = openIn(path);
  std::string line;
  std::getline(in, line);
  if (line.rfind("ply", 0) != 0) throw Error(ErrorKind::BadInput, "not a PLY file: " + path);

  std::vector<PlyElement> elements;
  bool ascii = false, swap = false, sawFormat = false;
  while (true) {
    if (!std::getline(in, line)) throw Error(ErrorKind::BadInput, "PLY header not terminated in " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "end_header") break;
    if (key == "format") {
      std::string fmt;
      ls >> fmt;
      sawFormat = true;
      if (fmt == "ascii") ascii = true;
      else if (fmt == "binary_big_endian") swap = true;
      else if (fmt != "binary_little_endian") throw Error(ErrorKind::BadInput, "unknown PLY format in " + path);
    } else if (key == "element") {
      PlyElement e;
      ls >> e.name >> e.count;
      if (!ls) throw Error(ErrorKind::BadInput, "malformed element line in " + path);
      elements.push_back(e);
    } else if (key == "property") {
      if (elements.empty()) throw Error(ErrorKind::BadInput, "property before element in " + path);
      PlyProperty p;
      std::string t;
      ls >> t;
      if (t == "list") {
        std::string ct, it;
        ls >> ct >> it >> p.name;
        p.isList = true;
        p.countType = parseType(ct, path);
        p.type = parseType(it, path);
      } else {
        p.type = parseType(t, path);
        ls >> p.name;
      }
      elements.back().props.push_back(p);
    }
  }
  if (!sawFormat) throw Error(ErrorKind::BadInput, "PLY format line missing in " + path);

  PlyData data;
  PlyValueReader r(in, path, ascii, swap);
  for (const PlyElement& e : elements) {
    const bool isVertex = e.name == "vertex", isFace = e.name == "face";
    int ix = -1, iy = -1, iz = -1, ir = -1, ig = -1, ib = -1, iface = -1;
    for (int k = 0; k < static_cast<int>(e.props.size()); ++k) {
      const std::string& n = e.props[k].name;
      if (n == "x") ix = k;
      else if (n == "y") iy = k;
      else if (n == "z") iz = k;
      else if (n == "red" || n == "r") ir = k;
      else if (n == "green" || n == "g") ig = k;
      else if (n == "blue" || n == "b") ib = k;
      else if ((n == "vertex_indices" || n == "vertex_index") && e.props[k].isList) iface = k;
    }
    if (isVertex && (ix < 0 || iy < 0 || iz < 0)) throw Error(ErrorKind::BadInput, "PLY vertices lack x/y/z in " + path);
    const bool colors = isVertex && ir >= 0 && ig >= 0 && ib >= 0;
    std::vector<double> vals(e.props.size());
    std::vector<std::uint32_t> poly;
    for (std::size_t i = 0; i < e.count; ++i) {
      for (std::size_t k = 0; k < e.props.size(); ++k) {
        const PlyProperty& p = e.props[k];
        if (!p.isList) {
          vals[k] = r.read(p.type);
          continue;
        }
        const double cnt = r.read(p.countType);
        if (cnt < 0 || cnt > 1e6) throw Error(ErrorKind::BadInput, "bad PLY list length in " + path);
        poly.clear();
        for (int j = 0; j < static_cast<int>(cnt); ++j) {
          const double v = r.read(p.type);
          poly.push_back(static_cast<std::uint32_t>(v));
        }
        if (isFace && static_cast<int>(k) == iface)
          for (std::size_t j = 1; j + 1 < poly.size(); ++j) data.faces.push_back({poly[0], poly[j], poly[j + 1]});
      }
      if (isVertex) {
        data.vertices.push_back({vals[ix], vals[iy], vals[iz]});
        if (colors)
          data.colors.push_back({static_cast<std::uint8_t>(vals[ir]), static_cast<std::uint8_t>(vals[ig]),
                                 static_cast<std::uint8_t>(vals[ib])});
      }
    }
  }
  for (const auto& f : data.faces)
    for (std::uint32_t v : f)
      if (v >= data.vertices.size()) throw Error(ErrorKind::BadInput, "PLY face index out of range in " + path);
  return data;
}

PointCloud readPointCloud(const std::string& path) {
  PlyData d = readPly(path);
  PointCloud c;
  c.positions = std::move(d.vertices);
  c.colors = std::move(d.colors);
  validateCloud(c);
  return c;
}

TriangleMesh readMesh(const std::string& path) {
  PlyData d = readPly(path);
  TriangleMesh m;
  m.vertices = std::move(d.vertices);
  m.triangles = std::move(d.faces);
  return m;
}

namespace {

void writePlyImpl(const std::string& path, const std::vector<Vec3>& verts, const std::vector<Color>* colors,
                  const std::vector<std::array<std::uint32_t, 3>>* faces, PlyFormat format) {
  std::ofstream out = openOut(path);
  const bool ascii = format == PlyFormat::Ascii;
  out << "ply\nformat " << (ascii ? "ascii" : "binary_little_endian") << " 1.0\n";
  out << "element vertex " << verts.size() << "\n";
  out << "property double x\nproperty double y\nproperty double z\n";
  const bool withColors = colors && !colors->empty();
  if (withColors) out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  if (faces) out << "element face " << faces->size() << "\nproperty list uchar int vertex_indices\n";
  out << "end_header\n";
  if (ascii) {
    out.precision(17);
    for (std::size_t i = 0; i < verts.size(); ++i) {
      out << verts[i].x << ' ' << verts[i].y << ' ' << verts[i].z;
      if (withColors) out << ' ' << int((*colors)[i][0]) << ' ' << int((*colors)[i][1]) << ' ' << int((*colors)[i][2]);
      out << '\n';
    }
    if (faces)
      for (const auto& f : *faces) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
  } else {
    for (std::size_t i = 0; i < verts.size(); ++i) {
      putLe(out, verts[i].x);
      putLe(out, verts[i].y);
      putLe(out, verts[i].z);
      if (withColors) out.write(reinterpret_cast<const char*>((*colors)[i].data()), 3);
    }
    if (faces)
      for (const auto& f : *faces) {
        putLe<std::uint8_t>(out, 3);
        for (std::uint32_t v : f) putLe(out, static_cast<std::int32_t>(v));
      }
  }
  finish(out, path);
}

}  // namespace

void writePly(const std::string& path, const PointCloud& cloud, PlyFormat format) {
  writePlyImpl(path, cloud.positions, &cloud.colors, nullptr, format);
}

void writePly(const std::string& path, const TriangleMesh& mesh, PlyFormat format) {
  writePlyImpl(path, mesh.vertices, nullptr, &mesh.triangles, format);
}

// ---- images ----

void writePfm(const std::string& path, const DepthMap& depth) {
  std::ofstream out = openOut(path);
  out << "Pf\n" << depth.width << ' ' << depth.height << "\n-1.0\n";
  for (int r = depth.height - 1; r >= 0; --r)  // PFM stores the bottom row first
    for (int c = 0; c < depth.width; ++c) {
      const float v = depth.at(c, r);
      putLe(out, std::isinf(v) && v > 0 ? FLT_MAX : v);
    }
  finish(out, path);
}

namespace {

// Reads the whitespace-separated header tokens of a PNM-style file.
std::string headerToken(std::istream& in, const std::string& path) {
  std::string tok;
  while (true) {
    int ch = in.peek();
    if (ch == '#') {
      std::string skip;
      std::getline(in, skip);
    } else if (std::isspace(ch)) {
      in.get();
    } else {
      break;
    }
  }
  if (!(in >> tok)) throw Error(ErrorKind::BadInput, "truncated header in " + path);
  return tok;
}

int positiveInt(const std::string& tok, const std::string& path) {
  try {
    const long v = std::stol(tok);
    if (v > 0 && v < (1 << 20)) return static_cast<int>(v);
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::BadInput, "bad image size in " + path);
}

}  // namespace

DepthMap readPfm(const std::string& path) {
  std::ifstream in = openIn(path);
  if (headerToken(in, path) != "Pf") throw Error(ErrorKind::BadInput, "not a single-channel PFM: " + path);
  const int w = positiveInt(headerToken(in, path), path);
  const int h = positiveInt(headerToken(in, path), path);
  const double scale = std::stod(headerToken(in, path));
  in.get();
  const bool swap = scale > 0;
  DepthMap d(w, h, kNoDepth);
  for (int r = h - 1; r >= 0; --r)
    for (int c = 0; c < w; ++c) {
      float v = getLe<float>(in, path);
      if (swap) v = byteswap(v);
      d.at(c, r) = v >= FLT_MAX ? kNoDepth : v;
    }
  return d;
}

void writePgm(const std::string& path, const BitMask& mask) {
  std::ofstream out = openOut(path);
  out << "P5\n" << mask.width << ' ' << mask.height << "\n255\n";
  for (std::uint8_t v : mask.data) putLe<std::uint8_t>(out, v ? 255 : 0);
  finish(out, path);
}

BitMask readPgm(const std::string& path) {
  std::ifstream in = openIn(path);
  if (headerToken(in, path) != "P5") throw Error(ErrorKind::BadInput, "not a binary PGM: " + path);
  const int w = positiveInt(headerToken(in, path), path);
  const int h = positiveInt(headerToken(in, path), path);
  const int maxv = positiveInt(headerToken(in, path), path);
  if (maxv > 255) throw Error(ErrorKind::BadInput, "16-bit PGM not supported: " + path);
  in.get();
  BitMask m(w, h, 0);
  for (auto& v : m.data) v = getLe<std::uint8_t>(in, path) ? 1 : 0;
  return m;
}

void writeIdm(const std::string& path, const IdMap& ids) {
  std::ofstream out = openOut(path);
  out.write("IDM1", 4);
  putLe(out, static_cast<std::uint32_t>(ids.width));
  putLe(out, static_cast<std::uint32_t>(ids.height));
  for (std::uint32_t v : ids.data) putLe(out, v);
  finish(out, path);
}

IdMap readIdm(const std::string& path) {
  std::ifstream in = openIn(path);
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "IDM1", 4) != 0) throw Error(ErrorKind::BadInput, "not an IDM1 file: " + path);
  const auto w = getLe<std::uint32_t>(in, path), h = getLe<std::uint32_t>(in, path);
  if (w == 0 || h == 0 || w > (1u << 20) || h > (1u << 20)) throw Error(ErrorKind::BadInput, "bad image size in " + path);
  IdMap m(static_cast<int>(w), static_cast<int>(h), kNoPoint);
  for (auto& v : m.data) v = getLe<std::uint32_t>(in, path);
  return m;
}

void writeText(const std::string& path, const std::string& text) {
  std::ofstream out = openOut(path);
  out << text;
  finish(out, path);
}

std::string readText(const std::string& path) {
  std::ifstream in = openIn(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace vvgc
