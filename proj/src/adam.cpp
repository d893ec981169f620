#include "sdfpose/adam.h"

#include <cmath>
#include <stdexcept>

namespace sdfpose {

void adam_step(AdamState& state, Eigen::VectorXd& params, const Eigen::VectorXd& grad, double lr,
               const AdamConfig& cfg, const Eigen::VectorXd& trainable) {
  const Eigen::Index n = params.size();
  if (grad.size() != n || state.m.size() != n || state.v.size() != n)
    throw std::invalid_argument("adam_step: size mismatch");
  if (trainable.size() != 0 && trainable.size() != n)
    throw std::invalid_argument("adam_step: mask size mismatch");
  if (!grad.allFinite()) throw std::invalid_argument("adam_step: non-finite gradient");

  ++state.step;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (Eigen::Index i = 0; i < n; ++i) {
    if (trainable.size() != 0 && trainable[i] == 0.0) continue;
    const double g = grad[i];
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
  }
}

}  // namespace sdfpose
