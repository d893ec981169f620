#pragma once

#include <optional>
#include <span>

#include "sdfpose/latent_sdf.h"
#include "sdfpose/sampling.h"

namespace sdfpose {

/// Decision variables of the joint fit.
struct FitParams {
  double s = 1.0;
  RotationParams rot;
  Vec3 t = Vec3::Zero();
  LatentCode z;

  SimilarityTransform transform() const { return {s, rot, t}; }
};

constexpr double kMinScale = 0.01;
constexpr double kMaxScale = 10.0;

/// Parameter groups that stay fixed during a fit.
struct FrozenMask {
  bool s = false;
  bool psi = false;
  bool rho = false;
  bool theta = false;
  bool t = false;
  bool z = false;

  static FrozenMask known_axis() {
    FrozenMask m;
    m.psi = m.rho = true;
    return m;
  }
};

struct ObjectiveOptions {
  double latent_prior = 1e-4;
  /// When set, predictions and targets are clamped to [-delta, delta] before
  /// taking residuals. Off by default.
  std::optional<double> clamp_delta;
};

/// sum_i |s f(R^T (x_i - t) / s, z) - phi_i| + latent_prior * |z|^2.
/// Throws std::invalid_argument on an empty batch or s <= 0 and
/// std::runtime_error naming the sample index when f is not finite.
double objective(const LatentSdf& space, const FitParams& params,
                 std::span<const SdfSample> batch, const ObjectiveOptions& opts = {});

struct FitGradient {
  double value = 0.0;  // objective at the evaluation point
  double s = 0.0;
  double psi = 0.0;
  double rho = 0.0;
  double theta = 0.0;
  Vec3 t = Vec3::Zero();
  Eigen::VectorXd z;
};

/// Objective value and gradient. Residuals that are exactly zero contribute a
/// zero subgradient; frozen components are returned as exactly zero.
FitGradient objective_gradient(const LatentSdf& space, const FitParams& params,
                               std::span<const SdfSample> batch,
                               const ObjectiveOptions& opts = {}, const FrozenMask& mask = {});

/// Flat layout [s, psi, rho, theta, tx, ty, tz, z...] used by the optimizer.
Eigen::VectorXd pack_params(const FitParams& p);
FitParams unpack_params(const Eigen::VectorXd& v);
Eigen::VectorXd pack_gradient(const FitGradient& g);
/// 1 for trainable entries of the flat layout, 0 for frozen ones.
Eigen::VectorXd trainable_mask(const FrozenMask& mask, int latent_dim);

}  // namespace sdfpose
