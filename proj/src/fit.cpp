#include "sdfpose/fit.h"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

#include "sdfpose/metrics.h"
#include "sdfpose/parallel.h"

namespace sdfpose {

void FitConfig::validate() const {
  if (iterations < 0) throw std::invalid_argument("iterations must be non-negative");
  if (batch_size == 0) throw std::invalid_argument("batch size must be positive");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (!(decay_factor > 0.0)) throw std::invalid_argument("decay factor must be positive");
  if (decay_interval <= 0) throw std::invalid_argument("decay interval must be positive");
  if (iterations > 0 && decay_interval > iterations)
    throw std::invalid_argument("decay interval exceeds the iteration count");
  if (objective.clamp_delta && !(*objective.clamp_delta > 0.0))
    throw std::invalid_argument("clamp delta must be positive");
}

double FitConfig::learning_rate_at(int iteration) const {
  return learning_rate / std::pow(decay_factor, iteration / decay_interval);
}

FitResult fit(const LatentSdf& space, const std::vector<SdfSample>& samples,
              const FitParams& init, const FitConfig& cfg) {
  cfg.validate();
  if (samples.empty()) throw std::invalid_argument("fit: no samples");
  if (init.z.size() != space.latent_dim())
    throw std::invalid_argument("fit: latent code dimension mismatch");
  const auto start = std::chrono::steady_clock::now();

  FitResult result;
  Eigen::VectorXd x = pack_params(init);
  x[0] = std::clamp(x[0], kMinScale, kMaxScale);
  const Eigen::VectorXd trainable = trainable_mask(cfg.frozen, space.latent_dim());
  AdamState state(x.size());

  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> pick(0, samples.size() - 1);
  std::vector<SdfSample> batch(cfg.batch_size);
  result.history.reserve(static_cast<std::size_t>(std::max(cfg.iterations, 1)));

  for (int it = 0; it < cfg.iterations; ++it) {
    for (auto& b : batch) b = samples[pick(rng)];
    const double lr = cfg.learning_rate_at(it);
    const FitGradient g =
        objective_gradient(space, unpack_params(x), batch, cfg.objective, cfg.frozen);
    const double loss = g.value / static_cast<double>(batch.size());
    result.history.push_back({it, loss, lr});
    if (!(loss <= cfg.divergence_limit))
      throw std::runtime_error("fit diverged at iteration " + std::to_string(it) +
                               " (loss " + std::to_string(loss) + ")");
    adam_step(state, x, pack_gradient(g), lr, cfg.adam, trainable);
    x[0] = std::clamp(x[0], kMinScale, kMaxScale);
  }

  result.params = unpack_params(x);
  result.final_objective = objective(space, result.params, samples, cfg.objective);
  if (cfg.iterations == 0)
    result.history.push_back(
        {0, result.final_objective / static_cast<double>(samples.size()), cfg.learning_rate});
  result.params.rot.theta = wrap_angle(result.params.rot.theta);

  if (cfg.extract_mesh) {
    try {
      result.mesh = extract_shape(space, result.params.z, result.params.transform(), cfg.grid);
      result.mesh_extracted = true;
    } catch (const EmptyExtractionError&) {
      result.mesh_extracted = false;
    }
  }
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

PartialInit partial_init_from_query(const SurfacePointSet& surface, const Vec3& axis,
                                    int latent_dim, std::uint64_t seed, double canonical_radius) {
  if (!(canonical_radius > 0.0)) throw std::invalid_argument("canonical radius must be positive");
  if (latent_dim < 1) throw std::invalid_argument("latent dimension must be positive");
  const BoundingSphere bs = bounding_sphere(surface.points);
  PartialInit out;
  out.s = std::clamp(bs.radius / canonical_radius, kMinScale, kMaxScale);
  out.t = bs.center;
  const auto angles = spherical_from_axis(axis);
  out.psi = angles[0];
  out.rho = angles[1];
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.01);
  out.z.resize(latent_dim);
  for (int i = 0; i < latent_dim; ++i) out.z[i] = noise(rng);
  return out;
}

GridFitResult fit_with_theta_grid(const LatentSdf& space, const std::vector<SdfSample>& samples,
                                  const PartialInit& init, const FitConfig& cfg,
                                  const SurfacePointSet& reference, const ThetaGridConfig& grid) {
  if (!(grid.step_degrees > 0.0 && grid.step_degrees <= 360.0))
    throw std::invalid_argument("theta grid step must be in (0, 360]");
  if (reference.empty()) throw std::invalid_argument("theta grid needs reference surface points");
  const auto count = static_cast<std::size_t>(std::ceil(360.0 / grid.step_degrees - 1e-9));

  GridFitResult out;
  out.start_thetas.resize(count);
  out.runs.resize(count);
  out.scores.assign(count, 0.0);
  for (std::size_t k = 0; k < count; ++k)
    out.start_thetas[k] = static_cast<double>(k) * grid.step_degrees * kPi / 180.0;

  FitConfig run_cfg = cfg;
  run_cfg.extract_mesh = true;
  parallel_for(count, grid.workers, [&](std::size_t k) {
    FitParams start;
    start.s = init.s;
    start.rot = {init.psi, init.rho, out.start_thetas[k]};
    start.t = init.t;
    start.z = init.z;
    out.runs[k] = fit(space, samples, start, run_cfg);
    if (out.runs[k].mesh_extracted && surface_area(out.runs[k].mesh) > 0.0) {
      const SurfacePointSet est =
          sample_surface(out.runs[k].mesh, grid.score_points, grid.score_seed);
      const SurfacePointSet est_target =
          sample_surface(out.runs[k].mesh, grid.score_points * 16, grid.score_seed + 1);
      out.scores[k] = f_score(est, est_target, reference, reference, grid.eps_fraction).f;
    }
  });
  for (std::size_t k = 1; k < count; ++k)
    if (out.scores[k] > out.scores[out.best]) out.best = k;
  return out;
}

std::string params_text(const FitParams& p, double final_objective) {
  std::string out;
  char buf[128];
  auto line = [&](const char* key, double v) {
    std::snprintf(buf, sizeof buf, "%s = %.17g\n", key, v);
    out += buf;
  };
  line("s", p.s);
  line("psi", p.rot.psi);
  line("rho", p.rot.rho);
  line("theta", p.rot.theta);
  line("tx", p.t.x());
  line("ty", p.t.y());
  line("tz", p.t.z());
  out += "z = ";
  for (Eigen::Index i = 0; i < p.z.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s%.17g", i ? "," : "", p.z[i]);
    out += buf;
  }
  out += "\n";
  line("final_objective", final_objective);
  return out;
}

void dump_fit_result(const FitResult& result, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  {
    std::ofstream loss(fs::path(dir) / "loss.csv", std::ios::trunc);
    if (!loss) throw std::runtime_error("cannot write loss history in " + dir);
    loss << "iter,loss,lr\n";
    char buf[96];
    for (const auto& h : result.history) {
      std::snprintf(buf, sizeof buf, "%d,%.9g,%.9g\n", h.iter, h.loss, h.lr);
      loss << buf;
    }
  }
  {
    std::ofstream params(fs::path(dir) / "params.txt", std::ios::trunc);
    if (!params) throw std::runtime_error("cannot write parameters in " + dir);
    params << params_text(result.params, result.final_objective);
  }
  if (result.mesh_extracted) write_obj(result.mesh, (fs::path(dir) / "mesh.obj").string());
}

}  // namespace sdfpose
