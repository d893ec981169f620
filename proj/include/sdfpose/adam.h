#pragma once

#include <Eigen/Core>

namespace sdfpose {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long step = 0;

  AdamState() = default;
  explicit AdamState(Eigen::Index n) : m(Eigen::VectorXd::Zero(n)), v(Eigen::VectorXd::Zero(n)) {}
};

/// One bias-corrected Adam update of params in place. Entries where
/// `trainable` is 0 are left untouched (pass an empty vector to train all).
/// Throws std::invalid_argument on size mismatch or non-finite gradients.
void adam_step(AdamState& state, Eigen::VectorXd& params, const Eigen::VectorXd& grad, double lr,
               const AdamConfig& cfg = {}, const Eigen::VectorXd& trainable = {});

}  // namespace sdfpose
