#pragma once

// Train-synthetic, test-real evaluation: a small classifier is trained on
// generated heatmaps only and scored on held-out real ones. Accuracy is never
// reported; the classes are heavily imbalanced.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "foldgan/loadsim.hpp"
#include "foldgan/nn/network.hpp"
#include "foldgan/wgan.hpp"

namespace foldgan::tstr {

inline constexpr std::size_t kClasses = 2;

struct ClassifierConfig {
  std::size_t epochs = 20;
  std::size_t batch_size = 16;
  double lr = 1e-3;

  void validate() const;
};

/// conv(16) + leaky ReLU, conv(32) + leaky ReLU (5x5, stride 2, same),
/// flatten, dense 128 + leaky ReLU, dense 2, softmax.
std::vector<nn::LayerSpec> classifier_specs();

template <typename T>
nn::Network<T> build_classifier(std::size_t P, std::size_t D, std::uint64_t seed);

/// Cross-entropy with Adam (betas 0.9, 0.999), reshuffled every epoch; the
/// last batch of an epoch may be short. The network is initialized from
/// derive_seed(seed, 0) and shuffled with derive_seed(seed, 1). Throws
/// DataError unless both classes are present.
nn::Network<float> train_classifier(const LabelledDataset& train_set, const ClassifierConfig& cfg,
                                    std::uint64_t seed);

/// counts[true][predicted].
struct ConfusionMatrix {
  std::array<std::array<std::size_t, kClasses>, kClasses> counts{};

  std::size_t total() const;
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// Argmax of the softmax output per item; a tie predicts class 0.
ConfusionMatrix evaluate(nn::Network<float>& model, const LabelledDataset& test_set);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  friend bool operator==(const ClassMetrics&, const ClassMetrics&) = default;
};

using PerClass = std::array<ClassMetrics, kClasses>;

/// Zero denominators give 0, never NaN.
PerClass class_metrics(const ConfusionMatrix& cm);

/// Unweighted mean of each metric over the two classes.
ClassMetrics macro_average(const PerClass& metrics);

struct FiveNumber {
  double min = 0.0;
  double lower_hinge = 0.0;
  double median = 0.0;
  double upper_hinge = 0.0;
  double max = 0.0;
  friend bool operator==(const FiveNumber&, const FiveNumber&) = default;
};

/// Tukey five-number summary; each hinge is the median of a half that
/// includes the overall median when the count is odd.
FiveNumber boxplot_stats(std::span<const double> values);

struct TrialResult {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
  ConfusionMatrix confusion;
  PerClass per_class{};
  ClassMetrics macro;
};

struct TopRow {
  std::size_t trial = 0;
  ClassMetrics macro;
};

/// Successful trials ranked by macro F1, then precision, then recall
/// (all descending), then trial index; at most k rows.
std::vector<TopRow> top_k(const std::vector<TrialResult>& trials, std::size_t k = 5);

struct MetricSummary {
  std::string metric;  // e.g. "macro_f1", "class1_precision"
  FiveNumber stats;
};

struct EvalReport {
  std::vector<TrialResult> trials;  // in trial order
  std::size_t failed = 0;
  std::vector<MetricSummary> summary;  // over successful trials only
  std::vector<TopRow> top;
};

/// Fills summary and top from trials.
void aggregate(EvalReport& report, std::size_t k = 5);

/// Produces `n` heatmaps labelled `label` from the real training items of
/// that class.
using GeneratorHook =
    std::function<LabelledDataset(const LabelledDataset& class_train, int label, std::size_t n, std::uint64_t seed)>;

/// Trains a WGAN on the class data (seeded by `seed`) and samples from it.
/// Divergence throws nn::DivergedError.
GeneratorHook gan_generator(const wgan::GanTrainConfig& cfg, const wgan::GanArch& arch);

/// Passes real training items off as generated: n draws with replacement.
GeneratorHook oracle_generator();

struct TstrConfig {
  std::size_t n_trials = 8;
  std::size_t n_generated_per_class = 5000;
  double train_ratio = 0.5;
  ClassifierConfig classifier;
  std::uint64_t seed = 1;
  std::size_t threads = 1;

  void validate() const;
};

/// Per trial t with seed s = derive_seed(cfg.seed, t): stratified split with
/// derive_seed(s, 1); per class c the hook gets derive_seed(s, 10 + c), the
/// classifier derive_seed(s, 30). Any exception inside a trial marks it
/// failed. Results do not depend on thread count or execution order.
EvalReport run_tstr_trials(const LabelledDataset& real, const TstrConfig& cfg, const GeneratorHook& generator,
                           const std::function<void(const TrialResult&)>& on_trial = {});

}  // namespace foldgan::tstr
