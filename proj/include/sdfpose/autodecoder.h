#pragma once

#include <cstdint>
#include <vector>

#include "sdfpose/decoder.h"
#include "sdfpose/fit.h"
#include "sdfpose/sampling.h"

namespace sdfpose {

struct TrainShape {
  int id = 0;
  std::vector<SdfSample> samples;
  LatentCode code;  // empty before training
};

struct ShapeLibrary {
  std::vector<TrainShape> shapes;
};

struct TrainConfig {
  int epochs = 100;
  double weight_lr = 2e-3;
  double code_lr = 2e-3;
  int lr_decay_interval = 33;  // epochs; 0 disables decay
  double lr_decay_factor = 2.0;
  double clamp_delta = 0.1;
  double latent_prior = 1e-4;
  std::size_t batch_size = 1024;
  int latent_dim = 16;
  std::vector<int> hidden = {128, 128, 128, 128};
  double softplus_beta = 100.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrainResult {
  MlpDecoder decoder;
  ShapeLibrary library;             // same shapes with learned codes
  std::vector<double> epoch_loss;   // mean minibatch loss per epoch
};

/// Auto-decoder training: network weights and one code per shape are updated
/// jointly with Adam on mean |clamp(f) - clamp(phi)| + latent_prior * |z|^2.
/// Codes that are empty start from N(0, 0.01^2); the network starts from
/// `init` when given, else from a seeded random network. Single-threaded and
/// deterministic for a fixed seed. Throws std::invalid_argument on an empty
/// library or a shape with fewer than 1000 samples, std::runtime_error if the
/// loss becomes non-finite.
TrainResult train_autodecoder(const ShapeLibrary& library, const TrainConfig& cfg,
                              const MlpDecoder* init = nullptr);

struct ReconstructConfig {
  int iterations = 800;
  std::size_t batch_size = 8000;
  double learning_rate = 0.05;
  double decay_factor = 5.0;
  int decay_interval = 400;
  double latent_prior = 1e-4;
  std::uint64_t seed = 0;
};

/// Code-only fit in the canonical pose, minimizing
/// sum |f(x_i, z) - phi_i| + latent_prior * |z|^2 from z0. Returns whichever of
/// the optimized code and z0 has the lower objective on all samples.
LatentCode reconstruct_latent(const LatentSdf& space, const std::vector<SdfSample>& samples,
                              const LatentCode& z0, const ReconstructConfig& cfg = {});

/// Seeded random spheres, rounded boxes, capsules and two-member unions, each
/// inside the unit sphere.
std::vector<AnalyticShape> procedural_shapes(std::size_t count, std::uint64_t seed);

/// Training samples of a canonical shape: near-surface points in a narrow and
/// a wider band plus uniform points in [-1, 1]^3.
std::vector<SdfSample> training_samples(const AnalyticShape& shape, std::size_t count,
                                        std::uint64_t seed);

}  // namespace sdfpose
