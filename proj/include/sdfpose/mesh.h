#pragma once

#include <array>
#include <string>
#include <vector>

#include "sdfpose/geometry.h"

namespace sdfpose {

/// Indexed triangle mesh; faces are counter-clockwise when seen from outside.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;

  bool empty() const { return faces.empty(); }
};

/// Throws std::invalid_argument on out-of-range indices or non-finite
/// vertices.
void validate(const TriangleMesh& mesh);

double surface_area(const TriangleMesh& mesh);

/// V - E + F with edges counted once per unordered vertex pair.
long euler_characteristic(const TriangleMesh& mesh);

/// True when every undirected edge is used by exactly two faces with opposite
/// orientation.
bool is_closed_manifold(const TriangleMesh& mesh);

TriangleMesh transform_mesh(const TriangleMesh& mesh, const SimilarityTransform& g);

/// Unit cube [-0.5, 0.5]^3 as 12 outward-facing triangles.
TriangleMesh unit_cube_mesh();

/// OBJ text: `v x y z` lines followed by 1-based `f i j k` lines.
std::string obj_string(const TriangleMesh& mesh);
void write_obj(const TriangleMesh& mesh, const std::string& path);

/// Reads v/f records; comments and other record types are skipped. Polygons
/// are fan-triangulated and `v/vt/vn` face tokens use the vertex index.
/// Throws std::runtime_error on I/O failure or malformed lines.
TriangleMesh read_obj(const std::string& path);
TriangleMesh parse_obj(const std::string& text);

}  // namespace sdfpose
