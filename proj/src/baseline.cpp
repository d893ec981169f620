#include "sdfpose/baseline.h"

#include <limits>
#include <stdexcept>

namespace sdfpose {

namespace {

SurfacePointSet normalized(const SurfacePointSet& set) {
  const BoundingSphere bs = bounding_sphere(set.points);
  const double scale = bs.radius > 0.0 ? 1.0 / bs.radius : 1.0;
  SurfacePointSet out;
  out.points.reserve(set.size());
  for (const auto& p : set.points) out.points.push_back((p - bs.center) * scale);
  return out;
}

}  // namespace

std::vector<LibraryEntry> make_library(const std::vector<TriangleMesh>& meshes,
                                       std::size_t points_per_shape, std::uint64_t seed) {
  std::vector<LibraryEntry> out;
  out.reserve(meshes.size());
  for (std::size_t i = 0; i < meshes.size(); ++i) {
    LibraryEntry e;
    e.id = static_cast<int>(i);
    e.mesh = meshes[i];
    e.points = sample_surface(meshes[i], points_per_shape, seed + i);
    out.push_back(std::move(e));
  }
  return out;
}

int retrieve_by_chamfer(const SurfacePointSet& query, const std::vector<LibraryEntry>& library) {
  if (library.empty()) throw std::invalid_argument("retrieve_by_chamfer: empty library");
  const SurfacePointSet q = normalized(query);
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& e : library) {
    const double d = chamfer(q, normalized(e.points));
    if (d < best_d || (d == best_d && e.id < best)) {
      best_d = d;
      best = e.id;
    }
  }
  return best;
}

BaselineResult baseline_pipeline(const TriangleMesh& query, const std::vector<LibraryEntry>& library,
                                 const Vec3& axis, const BaselineConfig& cfg) {
  if (library.empty()) throw std::invalid_argument("baseline_pipeline: empty library");
  const SurfacePointSet q = sample_surface(query, cfg.query_points, cfg.seed);

  BaselineResult out;
  out.retrieved_id = retrieve_by_chamfer(q, library);
  const LibraryEntry* member = nullptr;
  for (const auto& e : library)
    if (e.id == out.retrieved_id) member = &e;

  const SimilarityTransform coarse = coarse_init(q, member->points, axis, cfg.coarse_step_degrees);
  const IcpResult icp =
      assignment_icp(member->points, q, SimilarityMatrix::from_transform(coarse), cfg.icp);
  out.transform = icp.transform.to_transform();

  out.mesh = member->mesh;
  for (auto& v : out.mesh.vertices) v = icp.transform.apply(v);
  out.report = f_score(out.mesh, query, cfg.fscore_points, cfg.eps_fraction, cfg.seed + 7);
  return out;
}

}  // namespace sdfpose
