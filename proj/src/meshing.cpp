#include "sdfpose/meshing.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>

namespace sdfpose {

namespace {

// Cube corners, edges as corner pairs, and faces as corner cycles.
constexpr std::array<std::array<int, 3>, 8> kCorner = {{{0, 0, 0}, {1, 0, 0}, {1, 1, 0},
                                                        {0, 1, 0}, {0, 0, 1}, {1, 0, 1},
                                                        {1, 1, 1}, {0, 1, 1}}};
constexpr std::array<std::array<int, 2>, 12> kEdge = {{{0, 1}, {1, 2}, {2, 3}, {3, 0},
                                                       {4, 5}, {5, 6}, {6, 7}, {7, 4},
                                                       {0, 4}, {1, 5}, {2, 6}, {3, 7}}};
constexpr std::array<std::array<int, 4>, 6> kFace = {{{0, 1, 2, 3}, {4, 5, 6, 7}, {0, 1, 5, 4},
                                                      {1, 2, 6, 5}, {2, 3, 7, 6}, {3, 0, 4, 7}}};

int edge_between(int a, int b) {
  for (int e = 0; e < 12; ++e)
    if ((kEdge[e][0] == a && kEdge[e][1] == b) || (kEdge[e][0] == b && kEdge[e][1] == a)) return e;
  return -1;
}

Eigen::Vector3d corner_pos(int c) {
  return {double(kCorner[c][0]), double(kCorner[c][1]), double(kCorner[c][2])};
}

struct CaseTable {
  // Up to 5 triangles (15 edge ids) per case, -1 terminated.
  std::array<std::array<int, 16>, 256> tris;
};

CaseTable build_case_table() {
  CaseTable table;
  for (int config = 0; config < 256; ++config) {
    auto inside = [config](int c) { return (config >> c) & 1; };
    // Each crossing edge joins exactly two face segments.
    std::array<std::vector<int>, 12> links;
    for (const auto& face : kFace) {
      std::array<int, 4> edges;
      std::vector<int> crossing;
      for (int k = 0; k < 4; ++k) {
        edges[k] = edge_between(face[k], face[(k + 1) % 4]);
        if (inside(face[k]) != inside(face[(k + 1) % 4])) crossing.push_back(k);
      }
      auto link = [&](int ea, int eb) {
        links[ea].push_back(eb);
        links[eb].push_back(ea);
      };
      if (crossing.size() == 2) {
        link(edges[crossing[0]], edges[crossing[1]]);
      } else if (crossing.size() == 4) {
        // Diagonal configuration: cut off each inside corner.
        for (int k = 0; k < 4; ++k)
          if (inside(face[k])) link(edges[(k + 3) % 4], edges[k]);
      }
    }

    std::vector<int> tris;
    std::array<bool, 12> visited{};
    for (int start = 0; start < 12; ++start) {
      if (visited[start] || links[start].empty()) continue;
      std::vector<int> cycle{start};
      visited[start] = true;
      int prev = start, cur = links[start][0];
      while (cur != start) {
        cycle.push_back(cur);
        visited[cur] = true;
        const int next = links[cur][0] == prev ? links[cur][1] : links[cur][0];
        prev = cur;
        cur = next;
      }
      // Orient towards the outside corners.
      Eigen::Vector3d normal = Eigen::Vector3d::Zero();
      Eigen::Vector3d outward = Eigen::Vector3d::Zero();
      for (std::size_t i = 0; i < cycle.size(); ++i) {
        const auto& ea = kEdge[cycle[i]];
        const auto& eb = kEdge[cycle[(i + 1) % cycle.size()]];
        const Eigen::Vector3d pa = 0.5 * (corner_pos(ea[0]) + corner_pos(ea[1]));
        const Eigen::Vector3d pb = 0.5 * (corner_pos(eb[0]) + corner_pos(eb[1]));
        normal += pa.cross(pb);
        const int in_c = inside(ea[0]) ? ea[0] : ea[1];
        const int out_c = inside(ea[0]) ? ea[1] : ea[0];
        outward += corner_pos(out_c) - corner_pos(in_c);
      }
      if (normal.dot(outward) < 0.0) std::reverse(cycle.begin(), cycle.end());
      for (std::size_t i = 1; i + 1 < cycle.size(); ++i) {
        tris.push_back(cycle[0]);
        tris.push_back(cycle[i]);
        tris.push_back(cycle[i + 1]);
      }
    }
    table.tris[config].fill(-1);
    std::copy(tris.begin(), tris.end(), table.tris[config].begin());
  }
  return table;
}

const CaseTable& case_table() {
  static const CaseTable table = build_case_table();
  return table;
}

}  // namespace

TriangleMesh marching_cubes(const BatchField& field, const GridSpec& grid) {
  const int n = grid.resolution;
  if (n < 2) throw std::invalid_argument("grid resolution must be at least 2");
  if (!((grid.hi - grid.lo).minCoeff() > 0.0)) throw std::invalid_argument("grid bounds are degenerate");

  const Vec3 step(grid.spacing(0), grid.spacing(1), grid.spacing(2));
  auto node_pos = [&](int i, int j, int k) {
    return Vec3(grid.lo.x() + i * step.x(), grid.lo.y() + j * step.y(), grid.lo.z() + k * step.z());
  };
  auto node_id = [n](int i, int j, int k) {
    return (static_cast<std::size_t>(k) * n + j) * n + i;
  };

  // Field values, evaluated one z-slab at a time.
  const std::size_t total = static_cast<std::size_t>(n) * n * n;
  std::vector<double> values(total);
  std::vector<Vec3> slab(static_cast<std::size_t>(n) * n);
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) slab[static_cast<std::size_t>(j) * n + i] = node_pos(i, j, k);
    field(slab, std::span<double>(values.data() + node_id(0, 0, k), slab.size()));
  }
  for (double v : values)
    if (!std::isfinite(v)) throw std::invalid_argument("marching_cubes: field is not finite");

  const CaseTable& table = case_table();
  TriangleMesh mesh;
  std::unordered_map<std::size_t, int> vertex_of_edge;
  auto edge_vertex = [&](int i, int j, int k, int cube_edge) {
    const auto& e = kEdge[cube_edge];
    int a[3], b[3];
    for (int d = 0; d < 3; ++d) {
      a[d] = kCorner[e[0]][d];
      b[d] = kCorner[e[1]][d];
    }
    // Canonical grid edge: lower endpoint plus axis.
    int lo[3], axis = 0;
    for (int d = 0; d < 3; ++d) {
      lo[d] = std::min(a[d], b[d]);
      if (a[d] != b[d]) axis = d;
    }
    const std::size_t base = node_id(i + lo[0], j + lo[1], k + lo[2]);
    const std::size_t key = 3 * base + axis;
    auto it = vertex_of_edge.find(key);
    if (it != vertex_of_edge.end()) return it->second;

    const std::size_t na = node_id(i + a[0], j + a[1], k + a[2]);
    const std::size_t nb = node_id(i + b[0], j + b[1], k + b[2]);
    const double va = values[na], vb = values[nb];
    const double denom = va - vb;
    const double t = denom != 0.0 ? va / denom : 0.5;
    const Vec3 pa = node_pos(i + a[0], j + a[1], k + a[2]);
    const Vec3 pb = node_pos(i + b[0], j + b[1], k + b[2]);
    const int id = static_cast<int>(mesh.vertices.size());
    mesh.vertices.push_back(pa + t * (pb - pa));
    vertex_of_edge.emplace(key, id);
    return id;
  };

  for (int k = 0; k + 1 < n; ++k)
    for (int j = 0; j + 1 < n; ++j)
      for (int i = 0; i + 1 < n; ++i) {
        int config = 0;
        for (int c = 0; c < 8; ++c)
          if (values[node_id(i + kCorner[c][0], j + kCorner[c][1], k + kCorner[c][2])] < 0.0)
            config |= 1 << c;
        if (config == 0 || config == 255) continue;
        const auto& tri = table.tris[config];
        for (int t = 0; tri[t] >= 0; t += 3) {
          mesh.faces.push_back({edge_vertex(i, j, k, tri[t]), edge_vertex(i, j, k, tri[t + 1]),
                                edge_vertex(i, j, k, tri[t + 2])});
        }
      }
  return mesh;
}

TriangleMesh marching_cubes(const std::function<double(const Vec3&)>& field,
                            const GridSpec& grid) {
  return marching_cubes(
      BatchField([&field](std::span<const Vec3> xs, std::span<double> out) {
        for (std::size_t i = 0; i < xs.size(); ++i) out[i] = field(xs[i]);
      }),
      grid);
}

TriangleMesh extract_shape(const LatentSdf& space, const LatentCode& z,
                           const SimilarityTransform& g, const GridSpec& grid) {
  if (z.size() != space.latent_dim()) throw std::invalid_argument("latent code dimension mismatch");
  TriangleMesh mesh = marching_cubes(
      BatchField([&](std::span<const Vec3> xs, std::span<double> out) {
        space.eval_batch(xs, z, out);
      }),
      grid);
  if (mesh.empty()) throw EmptyExtractionError("no zero level set inside the extraction grid");
  return transform_mesh(mesh, g);
}

TriangleMesh vertex_clustering(const TriangleMesh& mesh, double cell) {
  if (!(cell > 0.0)) throw std::invalid_argument("vertex_clustering: cell must be positive");
  if (mesh.vertices.empty()) return mesh;
  Vec3 lo = mesh.vertices.front();
  for (const auto& v : mesh.vertices) lo = lo.cwiseMin(v);

  std::map<std::array<long long, 3>, int> cluster_of_cell;
  std::vector<int> cluster(mesh.vertices.size());
  std::vector<Vec3> sums;
  std::vector<int> counts;
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec3 rel = (mesh.vertices[i] - lo) / cell;
    const std::array<long long, 3> key = {static_cast<long long>(std::floor(rel.x())),
                                          static_cast<long long>(std::floor(rel.y())),
                                          static_cast<long long>(std::floor(rel.z()))};
    auto [it, inserted] = cluster_of_cell.emplace(key, static_cast<int>(sums.size()));
    if (inserted) {
      sums.push_back(Vec3::Zero());
      counts.push_back(0);
    }
    cluster[i] = it->second;
    sums[it->second] += mesh.vertices[i];
    ++counts[it->second];
  }

  TriangleMesh out;
  out.vertices.reserve(sums.size());
  for (std::size_t c = 0; c < sums.size(); ++c) out.vertices.push_back(sums[c] / counts[c]);

  std::set<std::array<int, 3>> seen;
  for (const auto& f : mesh.faces) {
    const std::array<int, 3> g = {cluster[f[0]], cluster[f[1]], cluster[f[2]]};
    if (g[0] == g[1] || g[1] == g[2] || g[0] == g[2]) continue;
    std::array<int, 3> key = g;
    std::sort(key.begin(), key.end());
    if (!seen.insert(key).second) continue;
    out.faces.push_back(g);
  }
  return out;
}

}  // namespace sdfpose
