#include "sdfpose/autodecoder.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>

#include "sdfpose/adam.h"

namespace sdfpose {

void TrainConfig::validate() const {
  if (epochs < 0) throw std::invalid_argument("epochs must be non-negative");
  if (!(weight_lr > 0.0 && code_lr > 0.0)) throw std::invalid_argument("learning rates must be positive");
  if (!(clamp_delta > 0.0)) throw std::invalid_argument("clamp delta must be positive");
  if (!(latent_prior >= 0.0)) throw std::invalid_argument("latent prior must be non-negative");
  if (batch_size == 0) throw std::invalid_argument("batch size must be positive");
  if (latent_dim < 1) throw std::invalid_argument("latent dimension must be positive");
  if (lr_decay_interval < 0 || !(lr_decay_factor > 0.0))
    throw std::invalid_argument("bad learning-rate decay");
}

namespace {

// Adam moments for one parameter block.
struct BlockAdam {
  Eigen::ArrayXXd m, v;

  void update(Eigen::Ref<Eigen::ArrayXXd> p, const Eigen::ArrayXXd& g, double lr, double c1,
              double c2, const AdamConfig& cfg) {
    if (m.size() == 0) {
      m = Eigen::ArrayXXd::Zero(p.rows(), p.cols());
      v = Eigen::ArrayXXd::Zero(p.rows(), p.cols());
    }
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.square();
    p -= lr * (m / c1) / ((v / c2).sqrt() + cfg.epsilon);
  }
};

}  // namespace

TrainResult train_autodecoder(const ShapeLibrary& library, const TrainConfig& cfg,
                              const MlpDecoder* init) {
  cfg.validate();
  if (library.shapes.empty()) throw std::invalid_argument("train_autodecoder: empty library");
  for (const auto& s : library.shapes)
    if (s.samples.size() < 1000)
      throw std::invalid_argument("train_autodecoder: shape " + std::to_string(s.id) +
                                  " has fewer than 1000 samples");

  std::mt19937_64 rng(cfg.seed);
  TrainResult out;
  out.decoder = init ? *init
                     : MlpDecoder::random(cfg.latent_dim, cfg.hidden, cfg.seed, false,
                                          cfg.softplus_beta);
  if (out.decoder.latent_dim() != cfg.latent_dim)
    throw std::invalid_argument("train_autodecoder: decoder latent dimension mismatch");
  // Start with outputs inside the clamp band; outside it the loss has no gradient.
  if (!init) out.decoder.mutable_layers().back().weight *= 0.01;
  out.library = library;
  std::normal_distribution<double> code_noise(0.0, 0.01);
  for (auto& s : out.library.shapes) {
    if (s.code.size() == 0) {
      s.code.resize(cfg.latent_dim);
      for (int i = 0; i < cfg.latent_dim; ++i) s.code[i] = code_noise(rng);
    } else if (s.code.size() != cfg.latent_dim) {
      throw std::invalid_argument("train_autodecoder: code dimension mismatch");
    }
  }
  if (cfg.epochs == 0) return out;

  std::vector<std::pair<std::uint32_t, std::uint32_t>> index;
  for (std::size_t k = 0; k < out.library.shapes.size(); ++k)
    for (std::size_t i = 0; i < out.library.shapes[k].samples.size(); ++i)
      index.emplace_back(static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(i));

  const int d = cfg.latent_dim;
  const double delta = cfg.clamp_delta;
  const AdamConfig adam;
  auto& layers = out.decoder.mutable_layers();
  std::vector<BlockAdam> weight_adam(layers.size()), bias_adam(layers.size());
  std::vector<AdamState> code_adam(out.library.shapes.size(), AdamState(d));
  long weight_step = 0;

  ForwardCache cache;
  DecoderGradient grad;
  Eigen::MatrixXd input_grad;
  std::vector<Eigen::VectorXd> code_grad(out.library.shapes.size(), Eigen::VectorXd::Zero(d));
  std::vector<int> code_count(out.library.shapes.size(), 0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double decay =
        cfg.lr_decay_interval > 0 ? std::pow(cfg.lr_decay_factor, epoch / cfg.lr_decay_interval) : 1.0;
    const double weight_lr = cfg.weight_lr / decay;
    const double code_lr = cfg.code_lr / decay;
    std::shuffle(index.begin(), index.end(), rng);

    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t begin = 0; begin < index.size(); begin += cfg.batch_size) {
      const std::size_t end = std::min(index.size(), begin + cfg.batch_size);
      const auto b = static_cast<Eigen::Index>(end - begin);
      Eigen::MatrixXd inputs(3 + d, b);
      Eigen::RowVectorXd target(b);
      for (Eigen::Index c = 0; c < b; ++c) {
        const auto [k, i] = index[begin + static_cast<std::size_t>(c)];
        const TrainShape& shape = out.library.shapes[k];
        inputs.col(c).head<3>() = shape.samples[i].x;
        inputs.col(c).tail(d) = shape.code;
        target[c] = std::clamp(shape.samples[i].phi, -delta, delta);
      }
      out.decoder.forward(inputs, cache);
      const Eigen::RowVectorXd pred = cache.output().row(0);

      Eigen::RowVectorXd upstream(b);
      double loss = 0.0;
      for (auto& g : code_grad) g.setZero();
      std::fill(code_count.begin(), code_count.end(), 0);
      for (Eigen::Index c = 0; c < b; ++c) {
        const double p = pred[c];
        const double r = std::clamp(p, -delta, delta) - target[c];
        loss += std::abs(r);
        upstream[c] = (std::abs(p) > delta || r == 0.0) ? 0.0 : (r > 0.0 ? 1.0 : -1.0) / b;
        const auto k = index[begin + static_cast<std::size_t>(c)].first;
        ++code_count[k];
      }
      loss /= static_cast<double>(b);
      for (std::size_t k = 0; k < out.library.shapes.size(); ++k)
        loss += cfg.latent_prior * code_count[k] * out.library.shapes[k].code.squaredNorm() / b;
      if (!std::isfinite(loss))
        throw std::runtime_error("train_autodecoder: non-finite loss in epoch " +
                                 std::to_string(epoch));
      loss_sum += loss;
      ++batches;

      grad.set_zero_like(layers);
      out.decoder.backward(cache, upstream, &input_grad, &grad);
      for (Eigen::Index c = 0; c < b; ++c) {
        const auto k = index[begin + static_cast<std::size_t>(c)].first;
        code_grad[k] += input_grad.col(c).tail(d);
      }

      ++weight_step;
      const double c1 = 1.0 - std::pow(adam.beta1, static_cast<double>(weight_step));
      const double c2 = 1.0 - std::pow(adam.beta2, static_cast<double>(weight_step));
      for (std::size_t l = 0; l < layers.size(); ++l) {
        weight_adam[l].update(layers[l].weight.array(), grad.weight[l].array(), weight_lr, c1, c2, adam);
        bias_adam[l].update(layers[l].bias.array(), grad.bias[l].array(), weight_lr, c1, c2, adam);
      }
      for (std::size_t k = 0; k < out.library.shapes.size(); ++k) {
        if (code_count[k] == 0) continue;
        auto& code = out.library.shapes[k].code;
        const Eigen::VectorXd g =
            code_grad[k] + (2.0 * cfg.latent_prior * code_count[k] / static_cast<double>(b)) * code;
        adam_step(code_adam[k], code, g, code_lr, adam);
      }
    }
    out.epoch_loss.push_back(loss_sum / static_cast<double>(batches));
  }
  return out;
}

LatentCode reconstruct_latent(const LatentSdf& space, const std::vector<SdfSample>& samples,
                              const LatentCode& z0, const ReconstructConfig& cfg) {
  if (samples.empty()) throw std::invalid_argument("reconstruct_latent: no samples");
  FitParams init;
  init.z = z0;
  FitConfig fc;
  fc.iterations = cfg.iterations;
  fc.batch_size = cfg.batch_size;
  fc.learning_rate = cfg.learning_rate;
  fc.decay_factor = cfg.decay_factor;
  fc.decay_interval = cfg.decay_interval;
  fc.objective.latent_prior = cfg.latent_prior;
  fc.frozen = {true, true, true, true, true, false};
  fc.seed = cfg.seed;
  fc.extract_mesh = false;
  const FitResult r = fit(space, samples, init, fc);
  const double start = objective(space, init, samples, fc.objective);
  return r.final_objective <= start ? r.params.z : z0;
}

namespace {

double bound_radius(const AnalyticShape& shape) {
  return std::visit(
      [](const auto& g) -> double {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          return g.center.norm() + g.radius;
        } else if constexpr (std::is_same_v<T, RoundedBox>) {
          return g.center.norm() + g.half_extents.norm() + g.corner_radius;
        } else if constexpr (std::is_same_v<T, Capsule>) {
          return std::max(g.a.norm(), g.b.norm()) + g.radius;
        } else {
          double r = 0.0;
          for (const auto& m : g.members) r = std::max(r, bound_radius(m));
          return r;
        }
      },
      shape.geometry);
}

AnalyticShape scaled(const AnalyticShape& shape, double k) {
  return std::visit(
      [k](const auto& g) -> AnalyticShape {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          return AnalyticShape::sphere(g.radius * k, g.center * k);
        } else if constexpr (std::is_same_v<T, RoundedBox>) {
          return AnalyticShape::rounded_box(g.half_extents * k, g.corner_radius * k, g.center * k);
        } else if constexpr (std::is_same_v<T, Capsule>) {
          return AnalyticShape::capsule(g.a * k, g.b * k, g.radius * k);
        } else {
          AnalyticShape u;
          ShapeUnion members;
          for (const auto& m : g.members) members.members.push_back(scaled(m, k));
          u.geometry = std::move(members);
          return u;
        }
      },
      shape.geometry);
}

}  // namespace

std::vector<AnalyticShape> procedural_shapes(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  auto range = [&](double lo, double hi) { return lo + (hi - lo) * uni(rng); };
  auto direction = [&] {
    std::normal_distribution<double> n(0.0, 1.0);
    Vec3 v;
    do v = Vec3(n(rng), n(rng), n(rng));
    while (v.norm() < 1e-6);
    return Vec3(v.normalized());
  };
  auto box = [&](const Vec3& c) {
    return AnalyticShape::rounded_box(Vec3(range(0.15, 0.45), range(0.15, 0.45), range(0.15, 0.45)),
                                      range(0.03, 0.1), c);
  };
  auto capsule = [&](const Vec3& c) {
    const Vec3 dir = direction();
    const double half = range(0.2, 0.45);
    return AnalyticShape::capsule(c - half * dir, c + half * dir, range(0.12, 0.28));
  };

  std::vector<AnalyticShape> out;
  for (std::size_t i = 0; i < count; ++i) {
    AnalyticShape s;
    switch (i % 4) {
      case 0:
        s = AnalyticShape::sphere(range(0.35, 0.7), 0.1 * direction() * uni(rng));
        break;
      case 1:
        s = box(Vec3::Zero());
        break;
      case 2:
        s = capsule(Vec3::Zero());
        break;
      default: {
        const Vec3 offset = range(0.2, 0.35) * direction();
        AnalyticShape first = uni(rng) < 0.5 ? box(-offset) : capsule(-offset);
        // Members overlap so that the union stays connected.
        const double gap = analytic_sdf(first, offset);
        const double radius = std::max(range(0.2, 0.35), gap + 0.08);
        s = AnalyticShape::union_of(std::move(first), AnalyticShape::sphere(radius, offset));
        break;
      }
    }
    const double r = bound_radius(s);
    if (r > 0.9) s = scaled(s, 0.9 / r);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<SdfSample> training_samples(const AnalyticShape& shape, std::size_t count,
                                        std::uint64_t seed) {
  const std::size_t narrow = count * 45 / 100;
  const std::size_t wide = count * 30 / 100;
  const std::size_t uniform = count - narrow - wide;
  AnalyticSampleConfig cfg;
  cfg.near_surface = narrow;
  cfg.uniform = 0;
  cfg.near_band = 0.01;
  cfg.seed = seed;
  std::vector<SdfSample> out = sample_analytic_sdf(shape, SimilarityTransform::identity(), cfg);
  cfg.near_surface = wide;
  cfg.near_band = 0.08;
  cfg.seed = seed + 1;
  const auto wide_samples = sample_analytic_sdf(shape, SimilarityTransform::identity(), cfg);
  out.insert(out.end(), wide_samples.begin(), wide_samples.end());
  cfg.near_surface = 0;
  cfg.uniform = uniform;
  cfg.seed = seed + 2;
  const auto uniform_samples = sample_analytic_sdf(shape, SimilarityTransform::identity(), cfg);
  out.insert(out.end(), uniform_samples.begin(), uniform_samples.end());
  return out;
}

}  // namespace sdfpose
