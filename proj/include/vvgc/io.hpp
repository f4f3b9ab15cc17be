#pragma once

#include <string>

#include "vvgc/core.hpp"
#include "vvgc/render.hpp"

namespace vvgc {

enum class PlyFormat { Ascii, BinaryLittleEndian };

// PLY reading accepts ascii and binary (either endianness), any numeric
// property type for x/y/z, optional red/green/blue, and polygon faces
// (fan-triangulated). Unknown elements and properties are skipped.
struct PlyData {
  std::vector<Vec3> vertices;
  std::vector<Color> colors;
  std::vector<std::array<std::uint32_t, 3>> faces;
};

PlyData readPly(const std::string& path);
PointCloud readPointCloud(const std::string& path);
TriangleMesh readMesh(const std::string& path);
void writePly(const std::string& path, const PointCloud& cloud, PlyFormat format = PlyFormat::BinaryLittleEndian);
void writePly(const std::string& path, const TriangleMesh& mesh, PlyFormat format = PlyFormat::BinaryLittleEndian);

// Pf single channel, little-endian; +inf is stored as FLT_MAX and read back as +inf.
void writePfm(const std::string& path, const DepthMap& depth);
DepthMap readPfm(const std::string& path);

// P5, 0 or 255 per pixel.
void writePgm(const std::string& path, const BitMask& mask);
BitMask readPgm(const std::string& path);

// "IDM1", u32 width, u32 height, row-major u32 payload, all little-endian.
void writeIdm(const std::string& path, const IdMap& ids);
IdMap readIdm(const std::string& path);

void writeText(const std::string& path, const std::string& text);
std::string readText(const std::string& path);

}  // namespace vvgc
