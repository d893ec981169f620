#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sdfpose/adam.h"
#include "sdfpose/meshing.h"
#include "sdfpose/objective.h"

namespace sdfpose {

struct FitConfig {
  int iterations = 800;
  std::size_t batch_size = 8000;  // drawn uniformly with replacement
  double learning_rate = 0.05;
  double decay_factor = 5.0;  // lr is divided by this every decay_interval iterations
  int decay_interval = 400;
  AdamConfig adam;
  ObjectiveOptions objective;
  FrozenMask frozen;
  std::uint64_t seed = 0;
  bool extract_mesh = true;
  GridSpec grid;
  double divergence_limit = 1e6;  // per-sample batch loss

  /// Throws std::invalid_argument on non-positive settings.
  void validate() const;
  double learning_rate_at(int iteration) const;
};

struct LossRecord {
  int iter = 0;
  double loss = 0.0;  // batch objective divided by batch size
  double lr = 0.0;
};

struct FitResult {
  FitParams params;  // theta wrapped into [-pi, pi]
  double final_objective = 0.0;  // over the full sample set
  std::vector<LossRecord> history;
  TriangleMesh mesh;   // transformed extraction; empty if disabled or nothing found
  bool mesh_extracted = false;
  double seconds = 0.0;
};

/// Adam descent of the joint objective from `init`. One history entry per
/// iteration (a single entry holding the initial loss when iterations is 0).
/// Throws std::runtime_error when the loss exceeds the divergence limit.
FitResult fit(const LatentSdf& space, const std::vector<SdfSample>& samples,
              const FitParams& init, const FitConfig& cfg);

/// Everything except the rotation angle, as estimated from the query.
struct PartialInit {
  double s = 1.0;
  Vec3 t = Vec3::Zero();
  double psi = 0.0;
  double rho = 0.0;
  LatentCode z;
};

/// Scale from the bounding-sphere radius of `surface` (divided by the
/// canonical radius of the shape space), translation from its center, axis
/// angles from `axis`, and a code drawn from N(0, 0.01^2).
PartialInit partial_init_from_query(const SurfacePointSet& surface, const Vec3& axis,
                                    int latent_dim, std::uint64_t seed,
                                    double canonical_radius = 1.0);

struct ThetaGridConfig {
  double step_degrees = 30.0;
  int workers = 1;
  std::size_t score_points = 3000;
  double eps_fraction = 0.05;
  std::uint64_t score_seed = 0;
};

struct GridFitResult {
  std::vector<double> start_thetas;
  std::vector<FitResult> runs;
  std::vector<double> scores;  // F-score of each run against the reference
  std::size_t best = 0;

  const FitResult& best_result() const { return runs.at(best); }
};

/// One fit per starting angle 0, step, 2 step, ... below 360 degrees; each run
/// is scored by F-score between its mesh and `reference`, and the best score
/// wins (lowest index on ties). Runs may execute concurrently.
GridFitResult fit_with_theta_grid(const LatentSdf& space, const std::vector<SdfSample>& samples,
                                  const PartialInit& init, const FitConfig& cfg,
                                  const SurfacePointSet& reference,
                                  const ThetaGridConfig& grid = {});

/// Writes loss.csv (iter,loss,lr), params.txt (key = value lines) and, when
/// present, mesh.obj into `dir`, creating it if needed.
void dump_fit_result(const FitResult& result, const std::string& dir);
std::string params_text(const FitParams& p, double final_objective);

}  // namespace sdfpose
