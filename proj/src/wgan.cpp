#include "foldgan/wgan.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "foldgan/io/format.hpp"

namespace foldgan::wgan {

using nn::LayerSpec;
using nn::Mode;
using nn::Network;
using nn::Tensor;

void GanArch::validate() const {
  if (latent_dim == 0) throw ConfigError("latent_dim must be positive");
  if (P == 0 || D == 0 || P % 8 != 0 || D % 8 != 0)
    throw ConfigError("heatmap dims " + std::to_string(P) + "x" + std::to_string(D) +
                      " are not divisible by 8; crop or pad the data first (fit_to_arch)");
}

void GanTrainConfig::validate() const {
  if (!(lr > 0.0)) throw ConfigError("gan lr must be positive");
  if (!(lr_decay > 0.0)) throw ConfigError("gan lr_decay must be positive");
  if (batch_size < 2) throw ConfigError("gan batch_size must be at least 2 (generator batch norm)");
  if (!(lambda_gp >= 0.0)) throw ConfigError("lambda_gp must be >= 0");
  if (n_critic < 1) throw ConfigError("n_critic must be >= 1");
  if (!(beta1 > 0.0 && beta1 < 1.0 && beta2 > 0.0 && beta2 < 1.0)) throw ConfigError("Adam betas must lie in (0, 1)");
}

std::vector<LayerSpec> generator_specs(const GanArch& arch) {
  arch.validate();
  const std::size_t h = arch.P / 8, w = arch.D / 8;
  return {
      LayerSpec::dense(GanArch::kProjectionChannels * h * w),
      LayerSpec::reshape({GanArch::kProjectionChannels, h, w}),
      LayerSpec::tconv2d(GanArch::kGeneratorChannels[0], GanArch::kKernel, 2),
      LayerSpec::batchnorm(),
      LayerSpec::leaky_relu(GanArch::kLeakSlope),
      LayerSpec::tconv2d(GanArch::kGeneratorChannels[1], GanArch::kKernel, 2),
      LayerSpec::batchnorm(),
      LayerSpec::leaky_relu(GanArch::kLeakSlope),
      LayerSpec::tconv2d(GanArch::kGeneratorChannels[2], GanArch::kKernel, 2),
      LayerSpec::sigmoid(),
  };
}

std::vector<LayerSpec> critic_specs(const GanArch& arch) {
  arch.validate();
  return {
      LayerSpec::conv2d(GanArch::kCriticChannels[0], GanArch::kKernel, 2),
      LayerSpec::leaky_relu(GanArch::kLeakSlope),
      LayerSpec::conv2d(GanArch::kCriticChannels[1], GanArch::kKernel, 2),
      LayerSpec::leaky_relu(GanArch::kLeakSlope),
      LayerSpec::conv2d(GanArch::kCriticChannels[2], GanArch::kKernel, 2),
      LayerSpec::leaky_relu(GanArch::kLeakSlope),
      LayerSpec::flatten(),
      LayerSpec::dense(GanArch::kCriticHidden),
      LayerSpec::leaky_relu(GanArch::kLeakSlope),
      LayerSpec::dense(1),
  };
}

template <typename T>
Network<T> build_generator(const GanArch& arch, std::uint64_t seed) {
  return Network<T>("generator", {arch.latent_dim}, generator_specs(arch), seed);
}

template <typename T>
Network<T> build_critic(const GanArch& arch, std::uint64_t seed) {
  return Network<T>("critic", {1, arch.P, arch.D}, critic_specs(arch), seed);
}

Heatmap fit_to_arch(const Heatmap& h, FitMode mode) {
  h.validate();
  const auto fit = [mode](std::size_t n) {
    const std::size_t down = n / 8 * 8;
    if (mode == FitMode::crop) {
      if (down == 0) throw DataError("heatmap side " + std::to_string(n) + " is too small to crop to a multiple of 8");
      return down;
    }
    return down == n ? n : down + 8;
  };
  const std::size_t P = fit(h.P), D = fit(h.D);
  Heatmap out(P, D, h.label);
  out.id = h.id;
  out.normalized = h.normalized;
  for (std::size_t r = 0; r < std::min(P, h.P); ++r)
    for (std::size_t c = 0; c < std::min(D, h.D); ++c) out.at(r, c) = h.at(r, c);
  return out;
}

template <typename T>
Tensor<T> to_tensor(const std::vector<Heatmap>& items) {
  if (items.empty()) throw DataError("to_tensor: no heatmaps");
  const std::size_t P = items.front().P, D = items.front().D;
  Tensor<T> out({items.size(), 1, P, D});
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].P != P || items[i].D != D) throw DataError("to_tensor: heatmaps differ in shape");
    std::transform(items[i].grid.begin(), items[i].grid.end(), out.ptr() + i * P * D,
                   [](double v) { return static_cast<T>(v); });
  }
  return out;
}

// ------------------------------------------------------- gradient penalty

template <typename T>
PenaltyResult<T> gradient_penalty(Network<T>& critic, const Tensor<T>& real, const Tensor<T>& fake, double lambda,
                                  std::span<const T> eps, bool accumulate) {
  if (lambda < 0.0) throw ConfigError("lambda_gp must be >= 0");
  if (real.shape() != fake.shape())
    throw nn::ShapeError("gradient_penalty: real " + nn::shape_string(real.shape()) + " vs fake " +
                         nn::shape_string(fake.shape()));
  const std::size_t batch = real.dim(0);
  if (eps.size() != batch) throw nn::ShapeError("gradient_penalty: one eps per sample required");
  const std::size_t per = real.size() / batch;

  Tensor<T> x_hat(real.shape());
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t i = b * per; i < (b + 1) * per; ++i) x_hat[i] = eps[b] * real[i] + (T{1} - eps[b]) * fake[i];

  const Tensor<T> scores = critic.forward(x_hat, Mode::train_fixed_stats);
  std::vector<Tensor<T>> output_grads;
  Tensor<T> grad = critic.backward_recording(Tensor<T>(scores.shape(), T{1}), output_grads, false);

  PenaltyResult<T> out;
  out.grad_norms.resize(batch);
  std::vector<T> coef(batch, T{0});
  double total = 0.0;
  const double scale = lambda / static_cast<double>(batch);
  for (std::size_t b = 0; b < batch; ++b) {
    double sq = 0.0;
    for (std::size_t i = b * per; i < (b + 1) * per; ++i) sq += static_cast<double>(grad[i]) * static_cast<double>(grad[i]);
    const double norm = std::sqrt(sq);
    out.grad_norms[b] = static_cast<T>(norm);
    total += (norm - 1.0) * (norm - 1.0);
    // d/dg (norm - 1)^2 = 2 (norm - 1) g / norm; zero subgradient at g = 0.
    if (norm > 0.0) coef[b] = static_cast<T>(2.0 * scale * (norm - 1.0) / norm);
  }
  out.penalty = static_cast<T>(scale * total);

  if (accumulate && lambda > 0.0) {
    for (std::size_t b = 0; b < batch; ++b)
      for (std::size_t i = b * per; i < (b + 1) * per; ++i) grad[i] *= coef[b];
    critic.accumulate_input_gradient_jvp(grad, output_grads);
  }
  return out;
}

template <typename T>
PenaltyResult<T> gradient_penalty(Network<T>& critic, const Tensor<T>& real, const Tensor<T>& fake, double lambda,
                                  std::uint64_t seed, bool accumulate) {
  Rng rng(seed);
  std::vector<T> eps(real.dim(0));
  for (auto& e : eps) e = static_cast<T>(rng.uniform());
  return gradient_penalty(critic, real, fake, lambda, std::span<const T>(eps), accumulate);
}

// ------------------------------------------------------------ train steps

namespace {

template <typename T>
Tensor<T> latent_batch(Rng& rng, std::size_t batch, std::size_t latent_dim) {
  Tensor<T> z({batch, latent_dim});
  for (auto& v : z.data()) v = static_cast<T>(rng.normal());
  return z;
}

}  // namespace

template <typename T>
CriticStats critic_objective(Network<T>& critic, const Tensor<T>& real, const Tensor<T>& fake, double lambda,
                             std::span<const T> eps, bool accumulate) {
  if (lambda < 0.0) throw ConfigError("lambda_gp must be >= 0");
  if (real.shape() != fake.shape()) throw nn::ShapeError("critic step: real and fake batches differ in shape");
  const std::size_t batch = real.dim(0);
  if (eps.size() != batch) throw nn::ShapeError("critic step: one eps per sample required");
  const std::size_t per = real.size() / batch;

  // One pass over [real; fake; interpolates]. The first 2B rows carry the
  // Wasserstein term, the last B rows the penalty's input gradient.
  Tensor<T> x_hat(real.shape());
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t i = b * per; i < (b + 1) * per; ++i) x_hat[i] = eps[b] * real[i] + (T{1} - eps[b]) * fake[i];
  const Tensor<T> scores = critic.forward(nn::concat_batch(nn::concat_batch(real, fake), x_hat), Mode::train_fixed_stats);

  double mean_real = 0.0, mean_fake = 0.0;
  for (std::size_t b = 0; b < batch; ++b) {
    mean_real += static_cast<double>(scores[b]);
    mean_fake += static_cast<double>(scores[batch + b]);
  }
  mean_real /= static_cast<double>(batch);
  mean_fake /= static_cast<double>(batch);
  CriticStats stats;
  stats.em_estimate = mean_real - mean_fake;
  if (!std::isfinite(stats.em_estimate)) throw nn::DivergedError("diverged: non-finite critic scores");

  Tensor<T> dy(scores.shape(), T{1});
  const T w = T{1} / static_cast<T>(batch);
  for (std::size_t b = 0; b < batch; ++b) {
    dy[b] = -w;
    dy[batch + b] = w;
  }
  std::vector<Tensor<T>> output_grads;
  const Tensor<T> dx = critic.backward_recording(dy, output_grads, false);

  Tensor<T> direction(real.shape());
  const double scale = lambda / static_cast<double>(batch);
  double total = 0.0;
  for (std::size_t b = 0; b < batch; ++b) {
    const T* g = dx.ptr() + (2 * batch + b) * per;
    double sq = 0.0;
    for (std::size_t i = 0; i < per; ++i) sq += static_cast<double>(g[i]) * static_cast<double>(g[i]);
    const double norm = std::sqrt(sq);
    total += (norm - 1.0) * (norm - 1.0);
    const T coef = norm > 0.0 ? static_cast<T>(2.0 * scale * (norm - 1.0) / norm) : T{0};
    for (std::size_t i = 0; i < per; ++i) direction[b * per + i] = coef * g[i];
  }
  stats.penalty = scale * total;
  stats.loss = -stats.em_estimate + stats.penalty;
  if (!std::isfinite(stats.loss))
    throw nn::DivergedError("diverged: non-finite critic loss (last EM estimate " + io::format_double(stats.em_estimate) +
                            ")");
  critic.accumulate_split_gradients(direction, 2 * batch, output_grads, !accumulate);
  return stats;
}

template <typename T>
CriticStats critic_loss_and_grad(Network<T>& critic, Network<T>& generator, const Tensor<T>& real,
                                 const GanTrainConfig& cfg, std::uint64_t seed, bool accumulate) {
  const std::size_t batch = real.dim(0);
  Rng rng(seed);
  const Tensor<T> z = latent_batch<T>(rng, batch, generator.input_shape().at(0));
  std::vector<T> eps(batch);
  for (auto& e : eps) e = static_cast<T>(rng.uniform());
  const Tensor<T> fake = generator.forward(z, Mode::train_fixed_stats);
  return critic_objective(critic, real, fake, cfg.lambda_gp, std::span<const T>(eps), accumulate);
}

template <typename T>
double generator_loss_and_grad(Network<T>& critic, Network<T>& generator, const GanTrainConfig& cfg,
                               std::uint64_t seed, Mode mode) {
  Rng rng(seed);
  const std::size_t batch = cfg.batch_size;
  const Tensor<T> z = latent_batch<T>(rng, batch, generator.input_shape().at(0));
  const Tensor<T> fake = generator.forward(z, mode);
  const Tensor<T> scores = critic.forward(fake, Mode::train_fixed_stats);
  double mean = 0.0;
  for (std::size_t b = 0; b < batch; ++b) mean += static_cast<double>(scores[b]);
  mean /= static_cast<double>(batch);
  if (!std::isfinite(mean)) throw nn::DivergedError("diverged: non-finite generator loss");
  const Tensor<T> dy(scores.shape(), -T{1} / static_cast<T>(batch));
  const Tensor<T> dfake = critic.backward(dy, false);
  generator.backward(dfake, true);
  return -mean;
}

template <typename T>
CriticStats critic_step(Network<T>& critic, Network<T>& generator, const Tensor<T>& real, const GanTrainConfig& cfg,
                        nn::Adam<T>& critic_opt, std::uint64_t seed) {
  if (real.dim(0) != cfg.batch_size)
    throw nn::ShapeError("critic step: batch of " + std::to_string(real.dim(0)) + ", configured " +
                         std::to_string(cfg.batch_size));
  const CriticStats stats = critic_loss_and_grad(critic, generator, real, cfg, seed, false);
  critic_opt.step(critic.params());
  return stats;
}

template <typename T>
double generator_step(Network<T>& critic, Network<T>& generator, const GanTrainConfig& cfg,
                      nn::Adam<T>& generator_opt, std::uint64_t seed) {
  generator.zero_grad();
  const double loss = generator_loss_and_grad(critic, generator, cfg, seed, Mode::train);
  generator_opt.step(generator.params());
  return loss;
}

// ------------------------------------------------------------ checkpoints

namespace {

nn::AdamConfig adam_config(const GanTrainConfig& cfg) { return {cfg.lr, cfg.beta1, cfg.beta2, 1e-8}; }

std::vector<NamedTensor> export_state(Network<float>& net) {
  std::vector<NamedTensor> out;
  for (const auto& ref : net.state()) out.push_back({ref.name, ref.tensor->shape(), ref.tensor->storage()});
  return out;
}

void import_state(Network<float>& net, const std::vector<NamedTensor>& tensors) {
  auto refs = net.state();
  if (refs.size() != tensors.size())
    throw DataError(net.name() + ": checkpoint has " + std::to_string(tensors.size()) + " tensors, architecture needs " +
                    std::to_string(refs.size()));
  for (std::size_t i = 0; i < refs.size(); ++i) {
    if (refs[i].name != tensors[i].name)
      throw DataError(net.name() + ": expected tensor '" + refs[i].name + "', found '" + tensors[i].name + "'");
    if (refs[i].tensor->shape() != tensors[i].shape)
      throw DataError("tensor '" + tensors[i].name + "' has shape " + nn::shape_string(tensors[i].shape) +
                      ", architecture needs " + nn::shape_string(refs[i].tensor->shape()));
    *refs[i].tensor = Tensor<float>(tensors[i].shape, tensors[i].data);
  }
}

OptimizerState export_optimizer(Network<float>& net, nn::Adam<float>& opt) {
  OptimizerState s;
  s.steps = opt.steps();
  s.lr = opt.config().lr;
  std::size_t i = 0;
  for (std::size_t li = 0; li < net.size(); ++li) {
    for (auto* p : net.layer(li).params()) {
      const std::string name = net.layer(li).name() + "." + p->name;
      s.first_moments.push_back({name + ".adam_m", opt.first_moments()[i].shape(), opt.first_moments()[i].storage()});
      s.second_moments.push_back({name + ".adam_v", opt.second_moments()[i].shape(), opt.second_moments()[i].storage()});
      ++i;
    }
  }
  return s;
}

void import_optimizer(nn::Adam<float>& opt, const OptimizerState& s) {
  if (s.first_moments.size() != opt.first_moments().size() || s.second_moments.size() != opt.second_moments().size())
    throw DataError("optimizer state does not match the architecture");
  opt.set_steps(s.steps);
  opt.set_lr(s.lr);
  for (std::size_t i = 0; i < s.first_moments.size(); ++i) {
    if (s.first_moments[i].shape != opt.first_moments()[i].shape() ||
        s.second_moments[i].shape != opt.second_moments()[i].shape())
      throw DataError("optimizer moment '" + s.first_moments[i].name + "' has the wrong shape");
    opt.first_moments()[i] = Tensor<float>(s.first_moments[i].shape, s.first_moments[i].data);
    opt.second_moments()[i] = Tensor<float>(s.second_moments[i].shape, s.second_moments[i].data);
  }
}

}  // namespace

GanModel::GanModel(const GanArch& arch_, const GanTrainConfig& cfg)
    : arch(arch_),
      generator(build_generator<float>(arch_, derive_seed(cfg.seed, stream::generator_init))),
      critic(build_critic<float>(arch_, derive_seed(cfg.seed, stream::critic_init))),
      generator_opt(generator.params(), adam_config(cfg)),
      critic_opt(critic.params(), adam_config(cfg)) {}

GanCheckpoint make_checkpoint(GanModel& model, int class_label, std::uint64_t epochs_completed, std::uint64_t seed,
                              bool include_training_state) {
  GanCheckpoint ckpt;
  ckpt.arch = model.arch;
  ckpt.class_label = class_label;
  ckpt.epochs_completed = epochs_completed;
  ckpt.seed = seed;
  ckpt.generator = export_state(model.generator);
  if (include_training_state) {
    TrainingState t;
    t.critic = export_state(model.critic);
    t.generator_opt = export_optimizer(model.generator, model.generator_opt);
    t.critic_opt = export_optimizer(model.critic, model.critic_opt);
    ckpt.training = std::move(t);
  }
  return ckpt;
}

Network<float> restore_generator(const GanCheckpoint& ckpt) {
  if (ckpt.format_version != GanCheckpoint::kFormatVersion)
    throw DataError("unsupported checkpoint format version " + std::to_string(ckpt.format_version));
  Network<float> gen = build_generator<float>(ckpt.arch, 0);
  import_state(gen, ckpt.generator);
  return gen;
}

GanModel restore_model(const GanCheckpoint& ckpt, const GanTrainConfig& cfg) {
  if (!ckpt.training) throw DataError("checkpoint has no training state");
  GanModel model(ckpt.arch, cfg);
  import_state(model.generator, ckpt.generator);
  import_state(model.critic, ckpt.training->critic);
  import_optimizer(model.generator_opt, ckpt.training->generator_opt);
  import_optimizer(model.critic_opt, ckpt.training->critic_opt);
  return model;
}

// --------------------------------------------------------------- training

TrainResult train_wgan(const LabelledDataset& class_data, const GanTrainConfig& cfg, const GanArch& arch,
                       const TrainOptions& options) {
  cfg.validate();
  arch.validate();
  if (class_data.size() == 0) throw DataError("train_wgan: no training data");
  class_data.validate();
  const int label = class_data.labels.front();
  for (std::size_t i = 0; i < class_data.size(); ++i) {
    if (class_data.labels[i] != label) throw DataError("train_wgan: data must hold a single class");
    if (!class_data.items[i].normalized) throw DataError("train_wgan: heatmaps must be normalized");
    if (class_data.items[i].P != arch.P || class_data.items[i].D != arch.D)
      throw DataError("train_wgan: heatmap shape does not match the architecture");
  }

  GanModel model(arch, cfg);
  const Tensor<float> data = to_tensor<float>(class_data.items);
  const std::size_t n = class_data.size();
  const std::size_t per = arch.P * arch.D;
  const std::size_t gen_iters = std::max<std::size_t>(1, n / (cfg.batch_size * cfg.n_critic));

  TrainResult result;
  Rng rng(derive_seed(cfg.seed, stream::training));
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Tensor<float> batch({cfg.batch_size, 1, arch.P, arch.D});
  double lr = cfg.lr;
  std::size_t epochs_done = 0;

  try {
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
      if (epoch > 0 && epoch == cfg.epochs / 2) {
        lr *= cfg.lr_decay;
        model.generator_opt.set_lr(lr);
        model.critic_opt.set_lr(lr);
      }
      rng.shuffle(order.begin(), order.end());
      std::size_t cursor = 0;
      EpochLog entry;
      entry.epoch = epoch;
      entry.lr = lr;
      for (std::size_t it = 0; it < gen_iters; ++it) {
        for (std::size_t j = 0; j < cfg.n_critic; ++j) {
          for (std::size_t b = 0; b < cfg.batch_size; ++b) {
            const std::size_t src = order[(cursor + b) % n];
            std::copy_n(data.ptr() + src * per, per, batch.ptr() + b * per);
          }
          cursor += cfg.batch_size;
          const CriticStats s = critic_step(model.critic, model.generator, batch, cfg, model.critic_opt, rng.next_u64());
          entry.em_estimate += s.em_estimate;
          entry.penalty += s.penalty;
        }
        entry.gen_loss += generator_step(model.critic, model.generator, cfg, model.generator_opt, rng.next_u64());
      }
      const auto critic_steps = static_cast<double>(gen_iters * cfg.n_critic);
      entry.em_estimate /= critic_steps;
      entry.penalty /= critic_steps;
      entry.gen_loss /= static_cast<double>(gen_iters);
      result.log.push_back(entry);
      epochs_done = epoch + 1;
      if (options.on_epoch) options.on_epoch(entry);
    }
  } catch (const nn::DivergedError& e) {
    result.diverged = true;
    result.error = e.what();
  }
  result.checkpoint = make_checkpoint(model, label, epochs_done, cfg.seed, options.keep_training_state);
  return result;
}

// --------------------------------------------------------------- sampling

LabelledDataset sample(Network<float>& generator, int label, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ConfigError("sample count must be >= 1");
  const nn::Shape& out = generator.output_shape();
  if (out.size() != 3 || out[0] != 1) throw nn::ShapeError("sample: generator must emit 1 x P x D");
  const std::size_t P = out[1], D = out[2];
  constexpr std::size_t kChunk = 64;
  Rng rng(derive_seed(seed, stream::sampling));
  LabelledDataset ds;
  ds.seed = seed;
  ds.items.reserve(n);
  for (std::size_t done = 0; done < n;) {
    const std::size_t m = std::min(kChunk, n - done);
    const Tensor<float> z = latent_batch<float>(rng, m, generator.input_shape().at(0));
    const Tensor<float> y = generator.forward(z, Mode::infer);
    for (std::size_t i = 0; i < m; ++i) {
      Heatmap h(P, D, label);
      h.normalized = true;
      h.id = "gen" + std::to_string(done + i);
      for (std::size_t k = 0; k < P * D; ++k) h.grid[k] = std::clamp(static_cast<double>(y[i * P * D + k]), 0.0, 1.0);
      ds.items.push_back(std::move(h));
      ds.labels.push_back(label);
    }
    done += m;
  }
  return ds;
}

LabelledDataset sample(const GanCheckpoint& ckpt, std::size_t n, std::uint64_t seed) {
  Network<float> gen = restore_generator(ckpt);
  return sample(gen, ckpt.class_label, n, seed);
}

std::string format_log(const std::vector<EpochLog>& log) {
  std::ostringstream out;
  out << "epoch,em_estimate,penalty,gen_loss\n";
  for (const auto& e : log)
    out << e.epoch << ',' << io::format_double(e.em_estimate) << ',' << io::format_double(e.penalty) << ','
        << io::format_double(e.gen_loss) << '\n';
  return out.str();
}

#define FOLDGAN_INSTANTIATE(T)                                                                                      \
  template Network<T> build_generator<T>(const GanArch&, std::uint64_t);                                             \
  template Network<T> build_critic<T>(const GanArch&, std::uint64_t);                                                \
  template Tensor<T> to_tensor<T>(const std::vector<Heatmap>&);                                                      \
  template PenaltyResult<T> gradient_penalty<T>(Network<T>&, const Tensor<T>&, const Tensor<T>&, double,             \
                                                std::span<const T>, bool);                                           \
  template PenaltyResult<T> gradient_penalty<T>(Network<T>&, const Tensor<T>&, const Tensor<T>&, double,             \
                                                std::uint64_t, bool);                                                \
  template CriticStats critic_objective<T>(Network<T>&, const Tensor<T>&, const Tensor<T>&, double,                  \
                                           std::span<const T>, bool);                                                \
  template CriticStats critic_loss_and_grad<T>(Network<T>&, Network<T>&, const Tensor<T>&, const GanTrainConfig&,    \
                                               std::uint64_t, bool);                                                 \
  template double generator_loss_and_grad<T>(Network<T>&, Network<T>&, const GanTrainConfig&, std::uint64_t, Mode);  \
  template CriticStats critic_step<T>(Network<T>&, Network<T>&, const Tensor<T>&, const GanTrainConfig&,             \
                                      nn::Adam<T>&, std::uint64_t);                                                  \
  template double generator_step<T>(Network<T>&, Network<T>&, const GanTrainConfig&, nn::Adam<T>&, std::uint64_t);

FOLDGAN_INSTANTIATE(float)
FOLDGAN_INSTANTIATE(double)

#undef FOLDGAN_INSTANTIATE

}  // namespace foldgan::wgan
