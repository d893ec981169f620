#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "sdfpose/geometry.h"

namespace sdfpose {

using LatentCode = Eigen::VectorXd;

struct SdfGradient {
  double value = 0.0;
  Vec3 d_x = Vec3::Zero();
  Eigen::VectorXd d_z;
};

/// Per-sample values and input gradients for a batch of query points that
/// share one latent code. d_z holds one column per sample.
struct BatchGradient {
  std::vector<double> value;
  std::vector<Vec3> d_x;
  Eigen::MatrixXd d_z;
};

/// A differentiable shape space: phi = f(x, z) approximates the signed
/// distance at canonical-frame point x of the shape encoded by z.
///
/// Implementations are immutable once built and may be shared between
/// threads.
class LatentSdf {
 public:
  virtual ~LatentSdf() = default;

  virtual int latent_dim() const = 0;
  virtual double eval(const Vec3& x, const LatentCode& z) const = 0;
  virtual SdfGradient grad(const Vec3& x, const LatentCode& z) const = 0;

  virtual void eval_batch(std::span<const Vec3> xs, const LatentCode& z,
                          std::span<double> out) const;
  virtual void grad_batch(std::span<const Vec3> xs, const LatentCode& z,
                          BatchGradient& out) const;

 protected:
  /// Throws std::invalid_argument if z does not have latent_dim() entries.
  void check_code(const LatentCode& z) const;
};

/// Exactly differentiable test family: a rounded box whose half extents are
/// 0.15 + 0.25 * sigmoid(z_i) for i = 0..2 and whose corner radius is
/// 0.05 + 0.1 * sigmoid(z_3).
class AnalyticFamily final : public LatentSdf {
 public:
  static constexpr int kDim = 4;

  int latent_dim() const override { return kDim; }
  double eval(const Vec3& x, const LatentCode& z) const override;
  SdfGradient grad(const Vec3& x, const LatentCode& z) const override;

  static Vec3 half_extents(const LatentCode& z);
  static double corner_radius(const LatentCode& z);
  static AnalyticShape shape(const LatentCode& z);
};

}  // namespace sdfpose
