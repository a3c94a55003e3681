#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "foldgan/loadsim.hpp"
#include "foldgan/nn/adam.hpp"
#include "foldgan/nn/network.hpp"

namespace foldgan::wgan {

/// Generator: dense(latent -> 128 x P/8 x D/8), then transposed convs with
/// 64, 32 and 1 output channels (5x5, stride 2, same padding); batch norm and
/// leaky ReLU after the first two, sigmoid after the last.
/// Critic: convs with 32, 64 and 128 channels (5x5, stride 2, same padding,
/// leaky ReLU), flatten, dense 1024 + leaky ReLU, dense 1 with a linear output.
struct GanArch {
  static constexpr std::size_t kProjectionChannels = 128;
  static constexpr std::size_t kGeneratorChannels[3] = {64, 32, 1};
  static constexpr std::size_t kCriticChannels[3] = {32, 64, 128};
  static constexpr std::size_t kCriticHidden = 1024;
  static constexpr std::size_t kKernel = 5;
  static constexpr double kLeakSlope = 0.2;

  std::size_t latent_dim = 128;
  std::size_t P = 24;
  std::size_t D = 64;

  void validate() const;
  friend bool operator==(const GanArch&, const GanArch&) = default;
};

std::vector<nn::LayerSpec> generator_specs(const GanArch& arch);
std::vector<nn::LayerSpec> critic_specs(const GanArch& arch);

template <typename T>
nn::Network<T> build_generator(const GanArch& arch, std::uint64_t seed);

template <typename T>
nn::Network<T> build_critic(const GanArch& arch, std::uint64_t seed);

struct GanTrainConfig {
  double lr = 1e-4;
  double lr_decay = 0.5;  // applied once, at epoch floor(epochs / 2)
  std::size_t batch_size = 4;
  std::size_t epochs = 220;
  double lambda_gp = 10.0;
  std::size_t n_critic = 5;
  double beta1 = 0.5;
  double beta2 = 0.9;
  std::uint64_t seed = 1;

  void validate() const;
};

/// How heatmaps whose sides are not multiples of 8 are brought to a shape
/// the generator can produce.
enum class FitMode { crop, pad };

/// Crops trailing rows/columns, or zero-pads them, to the nearest multiple
/// of 8 (down for crop, up for pad).
Heatmap fit_to_arch(const Heatmap& h, FitMode mode);

template <typename T>
struct PenaltyResult {
  T penalty{};
  std::vector<T> grad_norms;  // ||grad_x critic(x_hat)|| per sample
};

/// lambda * mean((||grad_x critic(x_hat)|| - 1)^2) over the interpolates
/// x_hat = eps * real + (1 - eps) * fake, one eps per sample. With
/// `accumulate`, adds the penalty's parameter gradient to the critic grads
/// (requires a piecewise-linear critic).
template <typename T>
PenaltyResult<T> gradient_penalty(nn::Network<T>& critic, const nn::Tensor<T>& real, const nn::Tensor<T>& fake,
                                  double lambda, std::span<const T> eps, bool accumulate = true);

/// Same with eps ~ U[0, 1) drawn from `seed`.
template <typename T>
PenaltyResult<T> gradient_penalty(nn::Network<T>& critic, const nn::Tensor<T>& real, const nn::Tensor<T>& fake,
                                  double lambda, std::uint64_t seed, bool accumulate = true);

struct CriticStats {
  double em_estimate = 0.0;  // mean critic(real) - mean critic(fake)
  double penalty = 0.0;
  double loss = 0.0;  // mean critic(fake) - mean critic(real) + penalty
};

/// Critic objective for explicit real/fake batches. Its parameter gradient
/// is added to the critic's grads, or replaces them when `accumulate` is
/// false. Throws DivergedError on a non-finite loss.
template <typename T>
CriticStats critic_objective(nn::Network<T>& critic, const nn::Tensor<T>& real, const nn::Tensor<T>& fake,
                             double lambda, std::span<const T> eps, bool accumulate = true);

/// Draws latent noise and eps from `seed`, produces the fake batch with the
/// generator (batch statistics, running statistics untouched) and evaluates
/// critic_objective.
template <typename T>
CriticStats critic_loss_and_grad(nn::Network<T>& critic, nn::Network<T>& generator, const nn::Tensor<T>& real,
                                 const GanTrainConfig& cfg, std::uint64_t seed, bool accumulate = true);

/// Generator loss -mean(critic(generator(z))); adds its gradient to the
/// generator's parameter grads only.
template <typename T>
double generator_loss_and_grad(nn::Network<T>& critic, nn::Network<T>& generator, const GanTrainConfig& cfg,
                               std::uint64_t seed, nn::Mode mode = nn::Mode::train);

/// One Adam update of the critic. The generator is left bitwise unchanged.
template <typename T>
CriticStats critic_step(nn::Network<T>& critic, nn::Network<T>& generator, const nn::Tensor<T>& real,
                        const GanTrainConfig& cfg, nn::Adam<T>& critic_opt, std::uint64_t seed);

/// One Adam update of the generator. The critic is left bitwise unchanged.
template <typename T>
double generator_step(nn::Network<T>& critic, nn::Network<T>& generator, const GanTrainConfig& cfg,
                      nn::Adam<T>& generator_opt, std::uint64_t seed);

struct NamedTensor {
  std::string name;
  nn::Shape shape;
  std::vector<float> data;
  friend bool operator==(const NamedTensor&, const NamedTensor&) = default;
};

struct OptimizerState {
  std::uint64_t steps = 0;
  double lr = 0.0;
  std::vector<NamedTensor> first_moments;
  std::vector<NamedTensor> second_moments;
  friend bool operator==(const OptimizerState&, const OptimizerState&) = default;
};

/// Critic parameters and both optimizer states; enough to resume training.
struct TrainingState {
  std::vector<NamedTensor> critic;
  OptimizerState generator_opt;
  OptimizerState critic_opt;
  friend bool operator==(const TrainingState&, const TrainingState&) = default;
};

struct GanCheckpoint {
  static constexpr std::uint32_t kFormatVersion = 1;

  std::uint32_t format_version = kFormatVersion;
  GanArch arch;
  int class_label = kNonPool;
  std::uint64_t epochs_completed = 0;
  std::uint64_t seed = 0;
  std::vector<NamedTensor> generator;  // parameters then batch-norm buffers
  std::optional<TrainingState> training;

  friend bool operator==(const GanCheckpoint&, const GanCheckpoint&) = default;
};

/// The two networks and their optimizers during training.
struct GanModel {
  GanArch arch;
  nn::Network<float> generator;
  nn::Network<float> critic;
  nn::Adam<float> generator_opt;
  nn::Adam<float> critic_opt;

  GanModel(const GanArch& arch, const GanTrainConfig& cfg);
};

GanCheckpoint make_checkpoint(GanModel& model, int class_label, std::uint64_t epochs_completed, std::uint64_t seed,
                              bool include_training_state);

/// Rebuilds the generator; throws DataError if tensor names or shapes do not
/// match the architecture.
nn::Network<float> restore_generator(const GanCheckpoint& ckpt);

/// Rebuilds networks and optimizers from a checkpoint with a training section.
GanModel restore_model(const GanCheckpoint& ckpt, const GanTrainConfig& cfg);

struct EpochLog {
  std::size_t epoch = 0;
  double em_estimate = 0.0;  // mean over the epoch's critic steps
  double penalty = 0.0;
  double gen_loss = 0.0;  // mean over the epoch's generator steps
  double lr = 0.0;
};

struct TrainResult {
  GanCheckpoint checkpoint;
  std::vector<EpochLog> log;
  bool diverged = false;
  std::string error;
};

struct TrainOptions {
  bool keep_training_state = false;
  /// Called after each epoch; for progress output.
  std::function<void(const EpochLog&)> on_epoch;
};

/// Trains one WGAN on heatmaps of a single class. Each epoch shuffles the
/// data and runs max(1, N / (batch * n_critic)) generator updates, each
/// preceded by n_critic critic updates on consecutive batches of the
/// shuffled order (wrapping around for small classes). On divergence the
/// result holds the partial log and the parameters from the last successful
/// update; no update is ever applied from a non-finite loss or gradient.
TrainResult train_wgan(const LabelledDataset& class_data, const GanTrainConfig& cfg, const GanArch& arch,
                       const TrainOptions& options = {});

/// n heatmaps from n latent draws with batch norm in inference mode.
LabelledDataset sample(const GanCheckpoint& ckpt, std::size_t n, std::uint64_t seed);
LabelledDataset sample(nn::Network<float>& generator, int label, std::size_t n, std::uint64_t seed);

/// Line-oriented training log: header `epoch,em_estimate,penalty,gen_loss`.
std::string format_log(const std::vector<EpochLog>& log);

/// Stacks normalized heatmaps into an [N x 1 x P x D] tensor.
template <typename T>
nn::Tensor<T> to_tensor(const std::vector<Heatmap>& items);

}  // namespace foldgan::wgan
