#include "sdfpose/latent_sdf.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sdfpose {

void LatentSdf::check_code(const LatentCode& z) const {
  if (z.size() != latent_dim())
    throw std::invalid_argument("latent code has " + std::to_string(z.size()) +
                                " entries, expected " + std::to_string(latent_dim()));
}

void LatentSdf::eval_batch(std::span<const Vec3> xs, const LatentCode& z,
                           std::span<double> out) const {
  if (out.size() != xs.size()) throw std::invalid_argument("eval_batch: size mismatch");
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = eval(xs[i], z);
}

void LatentSdf::grad_batch(std::span<const Vec3> xs, const LatentCode& z,
                           BatchGradient& out) const {
  const auto n = static_cast<Eigen::Index>(xs.size());
  out.value.resize(xs.size());
  out.d_x.resize(xs.size());
  out.d_z.resize(latent_dim(), n);
  for (Eigen::Index i = 0; i < n; ++i) {
    SdfGradient g = grad(xs[i], z);
    out.value[i] = g.value;
    out.d_x[i] = g.d_x;
    out.d_z.col(i) = g.d_z;
  }
}

namespace {

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

}  // namespace

Vec3 AnalyticFamily::half_extents(const LatentCode& z) {
  return {0.15 + 0.25 * sigmoid(z[0]), 0.15 + 0.25 * sigmoid(z[1]),
          0.15 + 0.25 * sigmoid(z[2])};
}

double AnalyticFamily::corner_radius(const LatentCode& z) {
  return 0.05 + 0.1 * sigmoid(z[3]);
}

AnalyticShape AnalyticFamily::shape(const LatentCode& z) {
  if (z.size() != kDim) throw std::invalid_argument("analytic family expects 4 latent entries");
  return AnalyticShape::rounded_box(half_extents(z), corner_radius(z));
}

double AnalyticFamily::eval(const Vec3& x, const LatentCode& z) const {
  check_code(z);
  return rounded_box_sdf(x, half_extents(z), corner_radius(z)).value;
}

SdfGradient AnalyticFamily::grad(const Vec3& x, const LatentCode& z) const {
  check_code(z);
  const RoundedBoxSdf box = rounded_box_sdf(x, half_extents(z), corner_radius(z));
  SdfGradient g;
  g.value = box.value;
  g.d_x = box.d_x;
  g.d_z.resize(kDim);
  for (int i = 0; i < 3; ++i) {
    const double sg = sigmoid(z[i]);
    g.d_z[i] = box.d_half_extents[i] * 0.25 * sg * (1.0 - sg);
  }
  const double sr = sigmoid(z[3]);
  g.d_z[3] = box.d_radius * 0.1 * sr * (1.0 - sr);
  return g;
}

}  // namespace sdfpose
