#include "sdfpose/mesh.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace sdfpose {

void validate(const TriangleMesh& mesh) {
  const auto n = static_cast<int>(mesh.vertices.size());
  for (const auto& v : mesh.vertices)
    if (!v.allFinite()) throw std::invalid_argument("mesh has non-finite vertex");
  for (const auto& f : mesh.faces)
    for (int i : f)
      if (i < 0 || i >= n) throw std::invalid_argument("mesh face index out of range");
}

double surface_area(const TriangleMesh& mesh) {
  double area = 0.0;
  for (const auto& f : mesh.faces) {
    const Vec3& a = mesh.vertices[f[0]];
    area += 0.5 * (mesh.vertices[f[1]] - a).cross(mesh.vertices[f[2]] - a).norm();
  }
  return area;
}

long euler_characteristic(const TriangleMesh& mesh) {
  std::set<std::pair<int, int>> edges;
  for (const auto& f : mesh.faces)
    for (int k = 0; k < 3; ++k) {
      const int a = f[k], b = f[(k + 1) % 3];
      edges.emplace(std::min(a, b), std::max(a, b));
    }
  std::set<int> used;
  for (const auto& f : mesh.faces) used.insert(f.begin(), f.end());
  return static_cast<long>(used.size()) - static_cast<long>(edges.size()) +
         static_cast<long>(mesh.faces.size());
}

bool is_closed_manifold(const TriangleMesh& mesh) {
  std::map<std::pair<int, int>, int> directed;
  for (const auto& f : mesh.faces)
    for (int k = 0; k < 3; ++k) ++directed[{f[k], f[(k + 1) % 3]}];
  for (const auto& [edge, count] : directed) {
    if (count != 1) return false;
    auto it = directed.find({edge.second, edge.first});
    if (it == directed.end() || it->second != 1) return false;
  }
  return true;
}

TriangleMesh transform_mesh(const TriangleMesh& mesh, const SimilarityTransform& g) {
  TriangleMesh out = mesh;
  const Mat3 sr = g.s * rotation_matrix(g.rot);
  for (auto& v : out.vertices) v = sr * v + g.t;
  return out;
}

TriangleMesh unit_cube_mesh() {
  TriangleMesh m;
  for (int i = 0; i < 8; ++i)
    m.vertices.emplace_back((i & 1) ? 0.5 : -0.5, (i & 2) ? 0.5 : -0.5, (i & 4) ? 0.5 : -0.5);
  m.faces = {{0, 2, 3}, {0, 3, 1},   // z = -0.5
             {4, 5, 7}, {4, 7, 6},   // z = +0.5
             {0, 1, 5}, {0, 5, 4},   // y = -0.5
             {2, 6, 7}, {2, 7, 3},   // y = +0.5
             {0, 4, 6}, {0, 6, 2},   // x = -0.5
             {1, 3, 7}, {1, 7, 5}};  // x = +0.5
  return m;
}

std::string obj_string(const TriangleMesh& mesh) {
  std::string out;
  out.reserve(mesh.vertices.size() * 40 + mesh.faces.size() * 24);
  char line[128];
  for (const auto& v : mesh.vertices) {
    std::snprintf(line, sizeof line, "v %.9g %.9g %.9g\n", v.x(), v.y(), v.z());
    out += line;
  }
  for (const auto& f : mesh.faces) {
    std::snprintf(line, sizeof line, "f %d %d %d\n", f[0] + 1, f[1] + 1, f[2] + 1);
    out += line;
  }
  return out;
}

void write_obj(const TriangleMesh& mesh, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << obj_string(mesh);
  if (!out) throw std::runtime_error("write failed for " + path);
}

TriangleMesh parse_obj(const std::string& text) {
  TriangleMesh mesh;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& what) {
    throw std::runtime_error("OBJ line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      double x, y, z;
      if (!(ls >> x >> y >> z)) fail("malformed vertex");
      mesh.vertices.emplace_back(x, y, z);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string tok;
      while (ls >> tok) {
        const std::string head = tok.substr(0, tok.find('/'));
        int v = 0;
        try {
          std::size_t used = 0;
          v = std::stoi(head, &used);
          if (used != head.size()) fail("malformed face index '" + tok + "'");
        } catch (const std::logic_error&) {
          fail("malformed face index '" + tok + "'");
        }
        const int n = static_cast<int>(mesh.vertices.size());
        const int zero_based = v > 0 ? v - 1 : n + v;
        if (v == 0 || zero_based < 0 || zero_based >= n) fail("face index out of range");
        idx.push_back(zero_based);
      }
      if (idx.size() < 3) fail("face with fewer than 3 vertices");
      for (std::size_t k = 1; k + 1 < idx.size(); ++k)
        mesh.faces.push_back({idx[0], idx[k], idx[k + 1]});
    }
  }
  return mesh;
}

TriangleMesh read_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_obj(buf.str());
}

}  // namespace sdfpose
