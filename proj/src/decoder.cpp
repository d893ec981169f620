#include "sdfpose/decoder.h"

#include <cmath>
#include <random>
#include <stdexcept>

#include "binary_io.h"

namespace sdfpose {

namespace {

constexpr Eigen::Index kChunk = 2048;

void apply_activation(Activation act, double beta, const Eigen::MatrixXd& pre,
                      Eigen::MatrixXd& post) {
  switch (act) {
    case Activation::kLinear:
      post = pre;
      break;
    case Activation::kTanh:
      post = pre.array().tanh();
      break;
    case Activation::kSoftplus:
      // max(v, 0) + log(1 + exp(-|beta v|)) / beta, vectorized.
      post = pre.array().max(0.0) + ((-(beta * pre.array()).abs()).exp() + 1.0).log() / beta;
      break;
  }
}

// Multiplies grad in place by the activation derivative evaluated at pre.
void scale_by_derivative(Activation act, double beta, const Eigen::MatrixXd& pre,
                         const Eigen::MatrixXd& post, Eigen::MatrixXd& grad) {
  switch (act) {
    case Activation::kLinear:
      break;
    case Activation::kTanh:
      grad.array() *= 1.0 - post.array().square();
      break;
    case Activation::kSoftplus:
      grad.array() *= 1.0 / (1.0 + (-beta * pre.array()).exp());
      break;
  }
}

}  // namespace

void DecoderGradient::set_zero_like(const std::vector<DenseLayer>& layers) {
  weight.resize(layers.size());
  bias.resize(layers.size());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    weight[l].setZero(layers[l].weight.rows(), layers[l].weight.cols());
    bias[l].setZero(layers[l].bias.size());
  }
}

MlpDecoder::MlpDecoder(int latent_dim, std::vector<DenseLayer> layers, double softplus_beta)
    : latent_dim_(latent_dim), layers_(std::move(layers)), softplus_beta_(softplus_beta) {
  check();
}

void MlpDecoder::check() const {
  if (latent_dim_ < 0) throw std::invalid_argument("negative latent dimension");
  if (layers_.empty()) throw std::invalid_argument("decoder needs at least one layer");
  if (!(softplus_beta_ > 0.0)) throw std::invalid_argument("softplus beta must be positive");
  Eigen::Index in = input_dim();
  for (const auto& layer : layers_) {
    if (layer.weight.cols() != in || layer.bias.size() != layer.weight.rows())
      throw std::invalid_argument("decoder layer dimensions do not chain");
    if (!layer.weight.allFinite() || !layer.bias.allFinite())
      throw std::invalid_argument("decoder weights must be finite");
    in = layer.weight.rows();
  }
  if (in != 1) throw std::invalid_argument("decoder output must be scalar");
}

MlpDecoder MlpDecoder::random(int latent_dim, std::span<const int> hidden, std::uint64_t seed,
                              bool tanh_output, double softplus_beta) {
  std::mt19937_64 rng(seed);
  std::vector<DenseLayer> layers;
  int in = 3 + latent_dim;
  auto make = [&](int out, Activation act, double stddev) {
    std::normal_distribution<double> normal(0.0, stddev);
    DenseLayer layer;
    layer.weight = Eigen::MatrixXd::NullaryExpr(out, in, [&] { return normal(rng); });
    layer.bias = Eigen::VectorXd::Zero(out);
    layer.activation = act;
    layers.push_back(std::move(layer));
    in = out;
  };
  for (int width : hidden) {
    if (width <= 0) throw std::invalid_argument("hidden width must be positive");
    make(width, Activation::kSoftplus, std::sqrt(2.0 / in));
  }
  make(1, tanh_output ? Activation::kTanh : Activation::kLinear, std::sqrt(1.0 / in));
  return MlpDecoder(latent_dim, std::move(layers), softplus_beta);
}

std::size_t MlpDecoder::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.weight.size() + l.bias.size();
  return n;
}

void MlpDecoder::forward(const Eigen::MatrixXd& inputs, ForwardCache& cache) const {
  if (inputs.rows() != input_dim())
    throw std::invalid_argument("decoder input has wrong dimension");
  const std::size_t n = layers_.size();
  cache.pre.resize(n);
  cache.post.resize(n + 1);
  cache.post[0] = inputs;
  for (std::size_t l = 0; l < n; ++l) {
    const DenseLayer& layer = layers_[l];
    cache.pre[l].noalias() = layer.weight * cache.post[l];
    cache.pre[l].colwise() += layer.bias;
    apply_activation(layer.activation, softplus_beta_, cache.pre[l], cache.post[l + 1]);
  }
}

void MlpDecoder::backward(const ForwardCache& cache, const Eigen::RowVectorXd& upstream,
                          Eigen::MatrixXd* input_grad, DecoderGradient* param_grad) const {
  if (upstream.size() != cache.output().cols())
    throw std::invalid_argument("upstream gradient has wrong batch size");
  Eigen::MatrixXd grad = upstream;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const DenseLayer& layer = layers_[l];
    scale_by_derivative(layer.activation, softplus_beta_, cache.pre[l], cache.post[l + 1], grad);
    if (param_grad) {
      param_grad->weight[l].noalias() += grad * cache.post[l].transpose();
      param_grad->bias[l] += grad.rowwise().sum();
    }
    if (l > 0 || input_grad) {
      Eigen::MatrixXd next;
      next.noalias() = layer.weight.transpose() * grad;
      grad.swap(next);
    }
  }
  if (input_grad) *input_grad = std::move(grad);
}

Eigen::MatrixXd pack_inputs(std::span<const Vec3> xs, const LatentCode& z) {
  Eigen::MatrixXd in(3 + z.size(), static_cast<Eigen::Index>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    in.col(c).head<3>() = xs[i];
    in.col(c).tail(z.size()) = z;
  }
  return in;
}

double decoder_forward(const MlpDecoder& dec, const Vec3& x, const LatentCode& z) {
  if (z.size() != dec.latent_dim()) throw std::invalid_argument("latent code dimension mismatch");
  ForwardCache cache;
  dec.forward(pack_inputs(std::span<const Vec3>(&x, 1), z), cache);
  return cache.output()(0, 0);
}

DecoderBackward decoder_backward(const MlpDecoder& dec, const Vec3& x, const LatentCode& z) {
  if (z.size() != dec.latent_dim()) throw std::invalid_argument("latent code dimension mismatch");
  ForwardCache cache;
  dec.forward(pack_inputs(std::span<const Vec3>(&x, 1), z), cache);
  DecoderBackward out;
  out.value = cache.output()(0, 0);
  out.dphi_dweights.set_zero_like(dec.layers());
  Eigen::MatrixXd input_grad;
  dec.backward(cache, Eigen::RowVectorXd::Ones(1), &input_grad, &out.dphi_dweights);
  out.dphi_dx = input_grad.col(0).head<3>();
  out.dphi_dz = input_grad.col(0).tail(dec.latent_dim());
  return out;
}

// ---------------------------------------------------------------------------

NeuralSdf::NeuralSdf(std::shared_ptr<const MlpDecoder> decoder) : decoder_(std::move(decoder)) {
  if (!decoder_) throw std::invalid_argument("NeuralSdf needs a decoder");
}

double NeuralSdf::eval(const Vec3& x, const LatentCode& z) const {
  check_code(z);
  return decoder_forward(*decoder_, x, z);
}

SdfGradient NeuralSdf::grad(const Vec3& x, const LatentCode& z) const {
  check_code(z);
  ForwardCache cache;
  decoder_->forward(pack_inputs(std::span<const Vec3>(&x, 1), z), cache);
  Eigen::MatrixXd input_grad;
  decoder_->backward(cache, Eigen::RowVectorXd::Ones(1), &input_grad, nullptr);
  return {cache.output()(0, 0), input_grad.col(0).head<3>(),
          input_grad.col(0).tail(latent_dim())};
}

void NeuralSdf::eval_batch(std::span<const Vec3> xs, const LatentCode& z,
                           std::span<double> out) const {
  check_code(z);
  if (out.size() != xs.size()) throw std::invalid_argument("eval_batch: size mismatch");
  ForwardCache cache;
  for (std::size_t begin = 0; begin < xs.size(); begin += kChunk) {
    const std::size_t count = std::min<std::size_t>(kChunk, xs.size() - begin);
    decoder_->forward(pack_inputs(xs.subspan(begin, count), z), cache);
    const Eigen::MatrixXd& y = cache.output();
    for (std::size_t i = 0; i < count; ++i) out[begin + i] = y(0, static_cast<Eigen::Index>(i));
  }
}

void NeuralSdf::grad_batch(std::span<const Vec3> xs, const LatentCode& z,
                           BatchGradient& out) const {
  check_code(z);
  const int d = latent_dim();
  out.value.resize(xs.size());
  out.d_x.resize(xs.size());
  out.d_z.resize(d, static_cast<Eigen::Index>(xs.size()));
  ForwardCache cache;
  Eigen::MatrixXd input_grad;
  for (std::size_t begin = 0; begin < xs.size(); begin += kChunk) {
    const std::size_t count = std::min<std::size_t>(kChunk, xs.size() - begin);
    decoder_->forward(pack_inputs(xs.subspan(begin, count), z), cache);
    decoder_->backward(cache, Eigen::RowVectorXd::Ones(static_cast<Eigen::Index>(count)),
                       &input_grad, nullptr);
    for (std::size_t i = 0; i < count; ++i) {
      const auto c = static_cast<Eigen::Index>(i);
      out.value[begin + i] = cache.output()(0, c);
      out.d_x[begin + i] = input_grad.col(c).head<3>();
      out.d_z.col(static_cast<Eigen::Index>(begin + i)) = input_grad.col(c).tail(d);
    }
  }
}

// ---------------------------------------------------------------------------

namespace {
constexpr std::uint32_t kCheckpointVersion = 1;
}

void save_checkpoint(const std::string& path, const MlpDecoder& dec,
                     const std::vector<LatentCode>& codes) {
  const auto& layers = dec.layers();
  for (std::size_t l = 0; l + 1 < layers.size(); ++l)
    if (layers[l].activation != layers.front().activation)
      throw std::invalid_argument("checkpoint requires one hidden activation");
  const Activation out_act = layers.back().activation;
  if (out_act != Activation::kLinear && out_act != Activation::kTanh)
    throw std::invalid_argument("checkpoint output activation must be linear or tanh");

  detail::ByteWriter w;
  w.magic("SDFD");
  w.u32(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(dec.latent_dim()));
  w.u32(static_cast<std::uint32_t>(layers.size()));
  for (const auto& layer : layers) {
    w.u32(static_cast<std::uint32_t>(layer.weight.rows()));
    w.u32(static_cast<std::uint32_t>(layer.weight.cols()));
  }
  for (const auto& layer : layers)
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c)
        w.f32(static_cast<float>(layer.weight(r, c)));
  for (const auto& layer : layers)
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) w.f32(static_cast<float>(layer.bias[r]));

  w.u32(static_cast<std::uint32_t>(codes.size()));
  for (const auto& code : codes) {
    if (code.size() != dec.latent_dim()) throw std::invalid_argument("code dimension mismatch");
    for (Eigen::Index i = 0; i < code.size(); ++i) w.f32(static_cast<float>(code[i]));
  }
  const std::uint32_t hidden_act =
      layers.size() > 1 ? static_cast<std::uint32_t>(layers.front().activation) : 0u;
  w.u32((out_act == Activation::kTanh ? 1u : 0u) | (hidden_act << 1));
  w.f32(static_cast<float>(dec.softplus_beta()));
  detail::write_file_bytes(path, w.bytes());
}

DecoderCheckpoint load_checkpoint(const std::string& path) {
  const auto bytes = detail::read_file_bytes(path);
  detail::ByteReader r(bytes);
  if (!r.expect_magic("SDFD")) throw std::runtime_error(path + ": not a decoder checkpoint");
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion)
    throw std::runtime_error(path + ": unsupported checkpoint version " + std::to_string(version));
  const auto d = static_cast<int>(r.u32());
  const std::uint32_t n_layers = r.u32();
  if (n_layers == 0 || n_layers > 1024) throw std::runtime_error(path + ": bad layer count");

  std::vector<DenseLayer> layers(n_layers);
  for (auto& layer : layers) {
    const std::uint32_t rows = r.u32(), cols = r.u32();
    if (std::uint64_t(rows) * cols > r.remaining())
      throw std::runtime_error(path + ": truncated checkpoint");
    layer.weight.resize(rows, cols);
    layer.bias.resize(rows);
  }
  for (auto& layer : layers)
    for (Eigen::Index i = 0; i < layer.weight.rows(); ++i)
      for (Eigen::Index j = 0; j < layer.weight.cols(); ++j) layer.weight(i, j) = r.f32();
  for (auto& layer : layers)
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias[i] = r.f32();

  DecoderCheckpoint ckpt;
  const std::uint32_t n_codes = r.u32();
  if (std::uint64_t(n_codes) * d * 4 > r.remaining())
    throw std::runtime_error(path + ": truncated code table");
  ckpt.codes.resize(n_codes);
  for (auto& code : ckpt.codes) {
    code.resize(d);
    for (int i = 0; i < d; ++i) code[i] = r.f32();
  }
  const std::uint32_t flags = r.u32();
  const double beta = r.f32();
  const auto hidden_act = static_cast<Activation>(flags >> 1);
  if (flags >> 1 > 2) throw std::runtime_error(path + ": unknown activation flags");
  for (std::uint32_t l = 0; l + 1 < n_layers; ++l) layers[l].activation = hidden_act;
  layers.back().activation = (flags & 1u) ? Activation::kTanh : Activation::kLinear;
  ckpt.decoder = MlpDecoder(d, std::move(layers), beta);
  return ckpt;
}

}  // namespace sdfpose
