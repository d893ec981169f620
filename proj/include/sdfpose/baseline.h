#pragma once

#include <cstdint>
#include <vector>

#include "sdfpose/metrics.h"
#include "sdfpose/registration.h"

namespace sdfpose {

/// One library member in canonical pose.
struct LibraryEntry {
  int id = 0;
  TriangleMesh mesh;
  SurfacePointSet points;  // surface samples of mesh
};

/// Builds entries with `points_per_shape` surface samples each; ids are the
/// positions in `meshes`.
std::vector<LibraryEntry> make_library(const std::vector<TriangleMesh>& meshes,
                                       std::size_t points_per_shape, std::uint64_t seed);

/// Id of the member with the smallest chamfer distance to the query after both
/// are normalized by their bounding spheres (center at the origin, unit
/// radius). Ties go to the lowest id. Throws on an empty library.
int retrieve_by_chamfer(const SurfacePointSet& query, const std::vector<LibraryEntry>& library);

struct BaselineConfig {
  std::size_t query_points = 3000;  // samples of the query surface
  IcpConfig icp;
  double coarse_step_degrees = 20.0;
  std::size_t fscore_points = 3000;
  double eps_fraction = 0.05;
  std::uint64_t seed = 0;
};

struct BaselineResult {
  int retrieved_id = -1;
  SimilarityTransform transform;  // maps the retrieved member onto the query
  FScoreReport report;            // retrieved + registered mesh vs the query mesh
  TriangleMesh mesh;
};

/// Retrieval, coarse initialization about `axis`, assignment ICP, and the
/// F-score of the registered member against the query.
BaselineResult baseline_pipeline(const TriangleMesh& query, const std::vector<LibraryEntry>& library,
                                 const Vec3& axis, const BaselineConfig& cfg = {});

}  // namespace sdfpose
