#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sdfpose/mesh.h"
#include "sdfpose/sampling.h"

namespace sdfpose {

struct BoundingSphere {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
};

/// Centroid and the largest distance to it. Not the minimal enclosing sphere.
BoundingSphere bounding_sphere(const std::vector<Vec3>& points);

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
};

/// Precision: fraction of est points whose nearest gt point is closer than
/// eps. Recall: the same with the roles swapped.
PrecisionRecall precision_recall(const SurfacePointSet& est, const SurfacePointSet& gt,
                                 double eps);

/// Linear-scan version of precision_recall, for cross-checking.
PrecisionRecall precision_recall_brute_force(const SurfacePointSet& est,
                                             const SurfacePointSet& gt, double eps);

struct FScoreReport {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
  double epsilon = 0.0;
  std::size_t n_est = 0;
  std::size_t n_gt = 0;
};

double harmonic_f(double precision, double recall);

/// F-score between two point sets. eps defaults to eps_fraction times the
/// bounding-sphere radius of gt.
FScoreReport f_score(const SurfacePointSet& est, const SurfacePointSet& gt,
                     double eps_fraction = 0.05, std::optional<double> eps = std::nullopt);

/// Counted points are tested against a separate target set for each side:
/// precision counts est points within eps of gt_target, recall counts gt
/// points within eps of est_target. eps defaults to eps_fraction times the
/// bounding-sphere radius of gt.
FScoreReport f_score(const SurfacePointSet& est, const SurfacePointSet& est_target,
                     const SurfacePointSet& gt, const SurfacePointSet& gt_target,
                     double eps_fraction = 0.05, std::optional<double> eps = std::nullopt);

/// Samples n counted points from each mesh; nearest neighbours are looked up
/// in n * densify further samples of the other mesh. With densify <= 1 the
/// counted samples are also the targets.
FScoreReport f_score(const TriangleMesh& est, const TriangleMesh& gt, std::size_t n = 3000,
                     double eps_fraction = 0.05, std::uint64_t seed = 0,
                     std::optional<double> eps = std::nullopt, std::size_t densify = 16);

/// |theta_hat - theta| measured the short way round, in [0, pi].
double rotation_error(double theta_hat, double theta);

/// Mean nearest-neighbour distance from a to b plus from b to a.
double chamfer(const SurfacePointSet& a, const SurfacePointSet& b);
double chamfer_brute_force(const SurfacePointSet& a, const SurfacePointSet& b);

struct MetricRow {
  std::string case_id;
  FScoreReport report;
  double rotation_error = 0.0;
};

/// CSV with header case_id,precision,recall,f,epsilon,rotation_error.
std::string metrics_csv(const std::vector<MetricRow>& rows);

}  // namespace sdfpose
