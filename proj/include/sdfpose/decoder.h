#pragma once

// Fully connected auto-decoder network f(x, z) with hand-written forward and
// backward passes. Input layout is [x, y, z, code...].

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sdfpose/latent_sdf.h"

namespace sdfpose {

enum class Activation : std::uint32_t { kSoftplus = 0, kTanh = 1, kLinear = 2 };

struct DenseLayer {
  Eigen::MatrixXd weight;  // rows = outputs, cols = inputs
  Eigen::VectorXd bias;
  Activation activation = Activation::kLinear;
};

struct DecoderGradient {
  std::vector<Eigen::MatrixXd> weight;
  std::vector<Eigen::VectorXd> bias;

  void set_zero_like(const std::vector<DenseLayer>& layers);
};

/// Activations of one batched forward pass, kept for the backward pass.
struct ForwardCache {
  std::vector<Eigen::MatrixXd> pre;   // W a + b per layer
  std::vector<Eigen::MatrixXd> post;  // post[0] is the input, post[l + 1] = act(pre[l])
  const Eigen::MatrixXd& output() const { return post.back(); }
};

class MlpDecoder {
 public:
  MlpDecoder() = default;
  /// Throws std::invalid_argument when layer shapes do not chain, the first
  /// layer does not take 3 + latent_dim inputs or the last layer is not scalar.
  MlpDecoder(int latent_dim, std::vector<DenseLayer> layers, double softplus_beta = 100.0);

  /// He-initialized network with `hidden` units per hidden layer, softplus
  /// hidden activations and a linear (or tanh) output.
  static MlpDecoder random(int latent_dim, std::span<const int> hidden, std::uint64_t seed,
                           bool tanh_output = false, double softplus_beta = 100.0);

  int latent_dim() const { return latent_dim_; }
  int input_dim() const { return 3 + latent_dim_; }
  double softplus_beta() const { return softplus_beta_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& mutable_layers() { return layers_; }
  std::size_t parameter_count() const;

  /// inputs: input_dim() x batch, one column per query.
  void forward(const Eigen::MatrixXd& inputs, ForwardCache& cache) const;

  /// Back-propagates upstream (1 x batch). Writes d(sum upstream_i phi_i)/d
  /// input per column into input_grad and accumulates parameter gradients
  /// into param_grad; either output may be null.
  void backward(const ForwardCache& cache, const Eigen::RowVectorXd& upstream,
                Eigen::MatrixXd* input_grad, DecoderGradient* param_grad) const;

 private:
  void check() const;

  int latent_dim_ = 0;
  std::vector<DenseLayer> layers_;
  double softplus_beta_ = 100.0;
};

/// Packs query points and one shared code into an input matrix.
Eigen::MatrixXd pack_inputs(std::span<const Vec3> xs, const LatentCode& z);

double decoder_forward(const MlpDecoder& dec, const Vec3& x, const LatentCode& z);

struct DecoderBackward {
  double value = 0.0;
  Vec3 dphi_dx = Vec3::Zero();
  Eigen::VectorXd dphi_dz;
  DecoderGradient dphi_dweights;
};
DecoderBackward decoder_backward(const MlpDecoder& dec, const Vec3& x, const LatentCode& z);

/// LatentSdf backed by a decoder network. Batched calls are evaluated in
/// fixed-size chunks.
class NeuralSdf final : public LatentSdf {
 public:
  explicit NeuralSdf(std::shared_ptr<const MlpDecoder> decoder);

  int latent_dim() const override { return decoder_->latent_dim(); }
  double eval(const Vec3& x, const LatentCode& z) const override;
  SdfGradient grad(const Vec3& x, const LatentCode& z) const override;
  void eval_batch(std::span<const Vec3> xs, const LatentCode& z,
                  std::span<double> out) const override;
  void grad_batch(std::span<const Vec3> xs, const LatentCode& z,
                  BatchGradient& out) const override;

  const MlpDecoder& decoder() const { return *decoder_; }

 private:
  std::shared_ptr<const MlpDecoder> decoder_;
};

// ---------------------------------------------------------------------------
// Checkpoint file: little-endian "SDFD", version, latent dim, layer count,
// rows/cols per layer, float32 weights (row-major, layer order), float32
// biases, then a code count and that many codes of latent-dim float32. A
// trailing flags word records hidden/output activations and a float32
// softplus beta.

struct DecoderCheckpoint {
  MlpDecoder decoder;
  std::vector<LatentCode> codes;
};

void save_checkpoint(const std::string& path, const MlpDecoder& dec,
                     const std::vector<LatentCode>& codes);
DecoderCheckpoint load_checkpoint(const std::string& path);

}  // namespace sdfpose
