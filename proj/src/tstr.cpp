#include "foldgan/tstr.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "foldgan/nn/adam.hpp"
#include "foldgan/nn/losses.hpp"
#include "foldgan/rng.hpp"

namespace foldgan::tstr {

using nn::LayerSpec;
using nn::Mode;
using nn::Network;
using nn::Tensor;

void ClassifierConfig::validate() const {
  if (batch_size == 0) throw ConfigError("classifier batch_size must be positive");
  if (!(lr > 0.0)) throw ConfigError("classifier lr must be positive");
}

void TstrConfig::validate() const {
  if (n_trials == 0) throw ConfigError("n_trials must be >= 1");
  if (n_generated_per_class == 0) throw ConfigError("n_generated_per_class must be >= 1");
  if (!(train_ratio > 0.0 && train_ratio < 1.0)) throw ConfigError("train_ratio must lie in (0, 1)");
  if (threads == 0) throw ConfigError("threads must be >= 1");
  classifier.validate();
}

std::vector<LayerSpec> classifier_specs() {
  return {
      LayerSpec::conv2d(16, 5, 2),  LayerSpec::leaky_relu(0.2), LayerSpec::conv2d(32, 5, 2),
      LayerSpec::leaky_relu(0.2),   LayerSpec::flatten(),       LayerSpec::dense(128),
      LayerSpec::leaky_relu(0.2),   LayerSpec::dense(kClasses), LayerSpec::softmax(),
  };
}

template <typename T>
Network<T> build_classifier(std::size_t P, std::size_t D, std::uint64_t seed) {
  if (P < 8 || D < 8) throw ConfigError("classifier input must be at least 8x8");
  return Network<T>("classifier", {1, P, D}, classifier_specs(), seed);
}

template Network<float> build_classifier<float>(std::size_t, std::size_t, std::uint64_t);
template Network<double> build_classifier<double>(std::size_t, std::size_t, std::uint64_t);

Network<float> train_classifier(const LabelledDataset& train_set, const ClassifierConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  if (train_set.size() == 0) throw DataError("train_classifier: empty training set");
  train_set.validate();
  for (int c = 0; c < static_cast<int>(kClasses); ++c)
    if (train_set.count(c) == 0)
      throw DataError("train_classifier: class " + std::to_string(c) + " is absent; both classes are required");
  if (train_set.count(kNonPool) + train_set.count(kPool) != train_set.size())
    throw DataError("train_classifier: labels must be 0 or 1");

  const std::size_t P = train_set.items.front().P, D = train_set.items.front().D;
  Network<float> net = build_classifier<float>(P, D, derive_seed(seed, 0));
  auto params = net.params();
  nn::Adam<float> opt(params, nn::AdamConfig{cfg.lr, 0.9, 0.999, 1e-8});

  const Tensor<float> data = wgan::to_tensor<float>(train_set.items);
  const std::size_t n = train_set.size(), per = P * D;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, 1));
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order.begin(), order.end());
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t m = std::min(cfg.batch_size, n - start);
      Tensor<float> x({m, 1, P, D});
      std::vector<int> labels(m);
      for (std::size_t b = 0; b < m; ++b) {
        const std::size_t src = order[start + b];
        std::copy_n(data.ptr() + src * per, per, x.ptr() + b * per);
        labels[b] = train_set.labels[src];
      }
      const Tensor<float> probs = net.forward(x, Mode::train);
      const auto xent = nn::xent_loss<float>(probs, labels);
      net.zero_grad();
      net.backward(xent.grad_logits, true, 1);
      opt.step(params);
    }
  }
  return net;
}

std::size_t ConfusionMatrix::total() const {
  std::size_t t = 0;
  for (const auto& row : counts)
    for (const std::size_t v : row) t += v;
  return t;
}

ConfusionMatrix evaluate(Network<float>& model, const LabelledDataset& test_set) {
  if (test_set.size() == 0) throw DataError("evaluate: empty test set");
  test_set.validate();
  constexpr std::size_t kChunk = 256;
  ConfusionMatrix cm;
  for (std::size_t start = 0; start < test_set.size(); start += kChunk) {
    const std::size_t m = std::min(kChunk, test_set.size() - start);
    const std::vector<Heatmap> chunk(test_set.items.begin() + static_cast<std::ptrdiff_t>(start),
                                     test_set.items.begin() + static_cast<std::ptrdiff_t>(start + m));
    const Tensor<float> probs = model.forward(wgan::to_tensor<float>(chunk), Mode::infer);
    for (std::size_t i = 0; i < m; ++i) {
      const int truth = test_set.labels[start + i];
      if (truth < 0 || truth >= static_cast<int>(kClasses))
        throw DataError("evaluate: label " + std::to_string(truth) + " is not 0 or 1");
      const int pred = probs[i * kClasses + 1] > probs[i * kClasses] ? 1 : 0;
      ++cm.counts[static_cast<std::size_t>(truth)][static_cast<std::size_t>(pred)];
    }
  }
  return cm;
}

PerClass class_metrics(const ConfusionMatrix& cm) {
  const auto ratio = [](std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  PerClass out{};
  for (std::size_t c = 0; c < kClasses; ++c) {
    const std::size_t tp = cm.counts[c][c];
    std::size_t predicted = 0, actual = 0;
    for (std::size_t o = 0; o < kClasses; ++o) {
      predicted += cm.counts[o][c];
      actual += cm.counts[c][o];
    }
    ClassMetrics& m = out[c];
    m.precision = ratio(tp, predicted);
    m.recall = ratio(tp, actual);
    const double s = m.precision + m.recall;
    m.f1 = s > 0.0 ? 2.0 * m.precision * m.recall / s : 0.0;
  }
  return out;
}

ClassMetrics macro_average(const PerClass& metrics) {
  return {(metrics[0].precision + metrics[1].precision) / 2.0, (metrics[0].recall + metrics[1].recall) / 2.0,
          (metrics[0].f1 + metrics[1].f1) / 2.0};
}

namespace {

double sorted_median(std::span<const double> v) {
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

}  // namespace

FiveNumber boxplot_stats(std::span<const double> values) {
  if (values.empty()) throw DataError("boxplot_stats: no values");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size(), half = (n + 1) / 2;
  const std::span<const double> all(v);
  return {v.front(), sorted_median(all.first(half)), sorted_median(all), sorted_median(all.last(half)), v.back()};
}

std::vector<TopRow> top_k(const std::vector<TrialResult>& trials, std::size_t k) {
  if (k == 0) throw ConfigError("top_k: k must be >= 1");
  std::vector<TopRow> rows;
  for (const auto& t : trials)
    if (!t.failed) rows.push_back({t.trial, t.macro});
  std::sort(rows.begin(), rows.end(), [](const TopRow& a, const TopRow& b) {
    if (a.macro.f1 != b.macro.f1) return a.macro.f1 > b.macro.f1;
    if (a.macro.precision != b.macro.precision) return a.macro.precision > b.macro.precision;
    if (a.macro.recall != b.macro.recall) return a.macro.recall > b.macro.recall;
    return a.trial < b.trial;
  });
  if (rows.size() > k) rows.resize(k);
  return rows;
}

void aggregate(EvalReport& report, std::size_t k) {
  report.failed = 0;
  report.summary.clear();
  std::vector<const TrialResult*> ok;
  for (const auto& t : report.trials) {
    if (t.failed)
      ++report.failed;
    else
      ok.push_back(&t);
  }
  report.top = top_k(report.trials, k);
  if (ok.empty()) return;
  const auto add = [&](std::string name, auto get) {
    std::vector<double> v;
    for (const TrialResult* t : ok) v.push_back(get(*t));
    report.summary.push_back({std::move(name), boxplot_stats(v)});
  };
  add("macro_precision", [](const TrialResult& t) { return t.macro.precision; });
  add("macro_recall", [](const TrialResult& t) { return t.macro.recall; });
  add("macro_f1", [](const TrialResult& t) { return t.macro.f1; });
  for (std::size_t c = 0; c < kClasses; ++c) {
    const std::string p = "class" + std::to_string(c) + "_";
    add(p + "precision", [c](const TrialResult& t) { return t.per_class[c].precision; });
    add(p + "recall", [c](const TrialResult& t) { return t.per_class[c].recall; });
    add(p + "f1", [c](const TrialResult& t) { return t.per_class[c].f1; });
  }
}

GeneratorHook gan_generator(const wgan::GanTrainConfig& cfg, const wgan::GanArch& arch) {
  return [cfg, arch](const LabelledDataset& class_train, int label, std::size_t n, std::uint64_t seed) {
    wgan::GanTrainConfig c = cfg;
    c.seed = seed;
    wgan::TrainResult r = wgan::train_wgan(class_train, c, arch);
    if (r.diverged) throw nn::DivergedError("class " + std::to_string(label) + " GAN: " + r.error);
    return wgan::sample(r.checkpoint, n, derive_seed(seed, stream::sampling));
  };
}

GeneratorHook oracle_generator() {
  return [](const LabelledDataset& class_train, int label, std::size_t n, std::uint64_t seed) {
    if (class_train.size() == 0) throw DataError("oracle generator: no real items");
    Rng rng(seed);
    LabelledDataset out;
    out.seed = seed;
    for (std::size_t i = 0; i < n; ++i) {
      out.items.push_back(class_train.items[rng.below(class_train.size())]);
      out.labels.push_back(label);
    }
    return out;
  };
}

namespace {

TrialResult run_trial(const LabelledDataset& real, const TstrConfig& cfg, const GeneratorHook& generator,
                      std::size_t trial) {
  TrialResult r;
  r.trial = trial;
  r.seed = derive_seed(cfg.seed, trial);
  try {
    auto [train, test] = split_dataset(real, cfg.train_ratio, derive_seed(r.seed, 1));
    LabelledDataset synthetic;
    for (int c = 0; c < static_cast<int>(kClasses); ++c) {
      LabelledDataset gen = generator(class_slice(train, c), c, cfg.n_generated_per_class,
                                      derive_seed(r.seed, 10 + static_cast<std::uint64_t>(c)));
      if (gen.size() != cfg.n_generated_per_class || gen.count(c) != gen.size())
        throw DataError("generator returned the wrong count or labels for class " + std::to_string(c));
      synthetic = concat(synthetic, gen);
    }
    Network<float> model = train_classifier(synthetic, cfg.classifier, derive_seed(r.seed, 30));
    r.confusion = evaluate(model, test);
    r.per_class = class_metrics(r.confusion);
    r.macro = macro_average(r.per_class);
  } catch (const std::exception& e) {
    r.failed = true;
    r.error = e.what();
  }
  return r;
}

}  // namespace

EvalReport run_tstr_trials(const LabelledDataset& real, const TstrConfig& cfg, const GeneratorHook& generator,
                           const std::function<void(const TrialResult&)>& on_trial) {
  cfg.validate();
  if (!generator) throw ConfigError("run_tstr_trials: no generator");
  real.validate();
  if (real.count(kNonPool) == 0 || real.count(kPool) == 0)
    throw DataError("run_tstr_trials: real data must contain both classes");

  EvalReport report;
  report.trials.resize(cfg.n_trials);
  std::atomic<std::size_t> next{0};
  std::mutex callback_mutex;
  const auto worker = [&] {
    for (std::size_t t = next++; t < cfg.n_trials; t = next++) {
      report.trials[t] = run_trial(real, cfg, generator, t);
      if (on_trial) {
        std::lock_guard lock(callback_mutex);
        on_trial(report.trials[t]);
      }
    }
  };
  const std::size_t n_threads = std::min(cfg.threads, cfg.n_trials);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  aggregate(report);
  return report;
}

}  // namespace foldgan::tstr
