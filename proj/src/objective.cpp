#include "sdfpose/objective.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace sdfpose {

namespace {

void check_inputs(const LatentSdf& space, const FitParams& params,
                  std::span<const SdfSample> batch) {
  if (batch.empty()) throw std::invalid_argument("objective: empty sample batch");
  if (!(params.s > 0.0)) throw std::invalid_argument("objective: scale must be positive");
  if (params.z.size() != space.latent_dim())
    throw std::invalid_argument("objective: latent code dimension mismatch");
}

std::vector<Vec3> warp_batch(const Mat3& r, const FitParams& params,
                             std::span<const SdfSample> batch) {
  std::vector<Vec3> ys(batch.size());
  const Mat3 rt = r.transpose();
  for (std::size_t i = 0; i < batch.size(); ++i) ys[i] = rt * (batch[i].x - params.t) / params.s;
  return ys;
}

void check_finite(double v, std::size_t i) {
  if (!std::isfinite(v))
    throw std::runtime_error("shape model returned a non-finite value at sample " +
                             std::to_string(i));
}

double clamp_to(double v, const std::optional<double>& delta) {
  return delta ? std::clamp(v, -*delta, *delta) : v;
}

}  // namespace

double objective(const LatentSdf& space, const FitParams& params,
                 std::span<const SdfSample> batch, const ObjectiveOptions& opts) {
  check_inputs(space, params, batch);
  const Mat3 r = rotation_matrix(params.rot);
  const std::vector<Vec3> ys = warp_batch(r, params, batch);
  std::vector<double> f(batch.size());
  space.eval_batch(ys, params.z, f);
  double sum = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    check_finite(f[i], i);
    sum += std::abs(clamp_to(params.s * f[i], opts.clamp_delta) -
                    clamp_to(batch[i].phi, opts.clamp_delta));
  }
  return sum + opts.latent_prior * params.z.squaredNorm();
}

FitGradient objective_gradient(const LatentSdf& space, const FitParams& params,
                               std::span<const SdfSample> batch, const ObjectiveOptions& opts,
                               const FrozenMask& mask) {
  check_inputs(space, params, batch);
  const Mat3 r = rotation_matrix(params.rot);
  const RotationPartials dr = rotation_matrix_partials(params.rot);
  const std::vector<Vec3> ys = warp_batch(r, params, batch);
  BatchGradient bg;
  space.grad_batch(ys, params.z, bg);

  FitGradient out;
  out.z = Eigen::VectorXd::Zero(params.z.size());
  Vec3 grad_fx_sum = Vec3::Zero();  // sum of w_i * grad f_i, for t
  double sum = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double f = bg.value[i];
    check_finite(f, i);
    const double pred = params.s * f;
    const double res = clamp_to(pred, opts.clamp_delta) - clamp_to(batch[i].phi, opts.clamp_delta);
    sum += std::abs(res);
    if (res == 0.0) continue;
    if (opts.clamp_delta && std::abs(pred) > *opts.clamp_delta) continue;
    const double w = res > 0.0 ? 1.0 : -1.0;
    const Vec3& gx = bg.d_x[i];
    const Vec3 d = batch[i].x - params.t;
    out.s += w * (f - gx.dot(ys[i]));
    out.psi += w * gx.dot(dr.d_psi.transpose() * d);
    out.rho += w * gx.dot(dr.d_rho.transpose() * d);
    out.theta += w * gx.dot(dr.d_theta.transpose() * d);
    grad_fx_sum += w * gx;
    out.z += (w * params.s) * bg.d_z.col(static_cast<Eigen::Index>(i));
  }
  out.t = -(r * grad_fx_sum);
  out.z += 2.0 * opts.latent_prior * params.z;
  out.value = sum + opts.latent_prior * params.z.squaredNorm();

  if (mask.s) out.s = 0.0;
  if (mask.psi) out.psi = 0.0;
  if (mask.rho) out.rho = 0.0;
  if (mask.theta) out.theta = 0.0;
  if (mask.t) out.t.setZero();
  if (mask.z) out.z.setZero();
  return out;
}

Eigen::VectorXd pack_params(const FitParams& p) {
  Eigen::VectorXd v(7 + p.z.size());
  v << p.s, p.rot.psi, p.rot.rho, p.rot.theta, p.t, p.z;
  return v;
}

FitParams unpack_params(const Eigen::VectorXd& v) {
  if (v.size() < 7) throw std::invalid_argument("unpack_params: vector too short");
  FitParams p;
  p.s = v[0];
  p.rot = {v[1], v[2], v[3]};
  p.t = v.segment<3>(4);
  p.z = v.tail(v.size() - 7);
  return p;
}

Eigen::VectorXd pack_gradient(const FitGradient& g) {
  Eigen::VectorXd v(7 + g.z.size());
  v << g.s, g.psi, g.rho, g.theta, g.t, g.z;
  return v;
}

Eigen::VectorXd trainable_mask(const FrozenMask& mask, int latent_dim) {
  Eigen::VectorXd m = Eigen::VectorXd::Ones(7 + latent_dim);
  if (mask.s) m[0] = 0.0;
  if (mask.psi) m[1] = 0.0;
  if (mask.rho) m[2] = 0.0;
  if (mask.theta) m[3] = 0.0;
  if (mask.t) m.segment<3>(4).setZero();
  if (mask.z) m.tail(latent_dim).setZero();
  return m;
}

}  // namespace sdfpose
