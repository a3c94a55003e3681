#include "foldgan/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "foldgan/io/checkpoint.hpp"
#include "foldgan/io/dataset_csv.hpp"
#include "foldgan/io/png.hpp"
#include "foldgan/io/report.hpp"
#include "foldgan/io/run_config.hpp"
#include "foldgan/tstr.hpp"
#include "foldgan/wgan.hpp"

namespace foldgan::cli {

namespace {

namespace fs = std::filesystem;

io::RunConfig load_config(const std::string& path) {
  return path.empty() ? io::default_run_config() : io::load_run_config(path);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

void ensure_parent(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

/// Effective configuration next to a file output: <path>.config.txt.
void echo_config(const io::RunConfig& cfg, const std::string& output_path) {
  io::save_run_config(cfg, output_path + ".config.txt");
}

/// Brings heatmaps to the generator's shape when needed.
LabelledDataset fit_dataset(const LabelledDataset& ds, wgan::FitMode mode) {
  LabelledDataset out = ds;
  for (auto& h : out.items)
    if (h.P % 8 != 0 || h.D % 8 != 0) h = wgan::fit_to_arch(h, mode);
  return out;
}

struct Options {
  std::string config, out, data, series, ckpt, real, in, log;
  int label = -1;
  std::size_t count = 5000, index = 0, top = 5;
  std::optional<std::size_t> epochs, trials, generated, threads, period;
  std::optional<std::uint64_t> seed;
  bool keep_state = false, oracle = false, raw = false, quiet = false;
  std::string fit = "none";
};

int cmd_simulate(const Options& o, std::ostream& out) {
  io::RunConfig cfg = load_config(o.config);
  if (o.seed) cfg.sim.seed = *o.seed;
  cfg.validate();
  fs::create_directories(o.out);
  const LabelledDataset ds = simulate_dataset(cfg.sim);
  const std::string data_path = (fs::path(o.out) / "dataset.csv").string();
  io::save_dataset(data_path, ds);
  io::save_run_config(cfg, (fs::path(o.out) / "config.txt").string());
  out << "wrote " << ds.size() << " households (" << ds.count(kPool) << " pool) to " << data_path << '\n';
  return kExitOk;
}

int cmd_fold(const Options& o, std::ostream& out, std::ostream& err) {
  std::optional<wgan::FitMode> fit;
  if (o.fit == "crop")
    fit = wgan::FitMode::crop;
  else if (o.fit == "pad")
    fit = wgan::FitMode::pad;
  LabelledDataset ds;
  for (const LoadSeries& s : io::load_series(o.series)) {
    const std::size_t P = o.period ? *o.period : s.samples_per_day();
    FoldResult r = fold(s, P);
    if (r.truncated())
      err << "warning: series '" << s.id << "': discarded " << r.discarded << " trailing samples\n";
    Heatmap h = o.raw ? r.heatmap : normalize(r.heatmap);
    if (fit) h = wgan::fit_to_arch(h, *fit);
    ds.labels.push_back(h.label);
    ds.items.push_back(std::move(h));
  }
  ensure_parent(o.out);
  io::save_dataset(o.out, ds);
  out << "folded " << ds.size() << " series into " << o.out << '\n';
  return kExitOk;
}

int cmd_train_gan(const Options& o, std::ostream& out, std::ostream& err) {
  io::RunConfig cfg = load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.epochs) cfg.gan.epochs = *o.epochs;
  cfg.gan.seed = cfg.seed;
  const LabelledDataset all = fit_dataset(io::load_dataset(o.data), cfg.fit);
  const LabelledDataset cls = class_slice(all, o.label);
  if (cls.size() == 0) throw DataError("no items with label " + std::to_string(o.label) + " in " + o.data);
  const wgan::GanArch arch{cfg.latent_dim, cls.items.front().P, cls.items.front().D};
  cfg.sim.P = arch.P;
  cfg.sim.D = arch.D;
  wgan::TrainOptions opts;
  opts.keep_training_state = o.keep_state;
  const auto t0 = std::chrono::steady_clock::now();
  if (!o.quiet)
    opts.on_epoch = [&](const wgan::EpochLog& e) {
      const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      err << "epoch " << e.epoch + 1 << '/' << cfg.gan.epochs << " em " << e.em_estimate << " gp " << e.penalty
          << " g " << e.gen_loss << " (" << s << " s)\n";
    };
  const wgan::TrainResult r = wgan::train_wgan(cls, cfg.gan, arch, opts);
  ensure_parent(o.out);
  io::save_checkpoint(r.checkpoint, o.out);
  write_text(o.log.empty() ? o.out + ".log.csv" : o.log, wgan::format_log(r.log));
  echo_config(cfg, o.out);
  if (r.diverged) {
    err << "error: " << r.error << "; checkpoint holds the last good parameters\n";
    return kExitRuntime;
  }
  out << "trained class " << o.label << " on " << cls.size() << " heatmaps for " << r.log.size() << " epochs -> "
      << o.out << '\n';
  return kExitOk;
}

int cmd_generate(const Options& o, std::ostream& out) {
  io::RunConfig cfg = load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  const wgan::GanCheckpoint ckpt = io::load_checkpoint(o.ckpt);
  const LabelledDataset ds = wgan::sample(ckpt, o.count, cfg.seed);
  ensure_parent(o.out);
  io::save_dataset(o.out, ds);
  echo_config(cfg, o.out);
  out << "generated " << ds.size() << " heatmaps of class " << ckpt.class_label << " -> " << o.out << '\n';
  return kExitOk;
}

int cmd_evaluate(const Options& o, std::ostream& out, std::ostream& err) {
  io::RunConfig cfg = load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.trials) cfg.trials = *o.trials;
  if (o.generated) cfg.generated_per_class = *o.generated;
  if (o.threads) cfg.threads = *o.threads;
  if (o.epochs) cfg.gan.epochs = *o.epochs;
  const LabelledDataset real = fit_dataset(io::load_dataset(o.real), cfg.fit);
  if (real.size() == 0) throw DataError("no real data in " + o.real);
  cfg.sim.P = real.items.front().P;
  cfg.sim.D = real.items.front().D;
  cfg.validate();
  const wgan::GanArch arch{cfg.latent_dim, cfg.sim.P, cfg.sim.D};
  const tstr::GeneratorHook hook = o.oracle ? tstr::oracle_generator() : tstr::gan_generator(cfg.gan, arch);
  const auto t0 = std::chrono::steady_clock::now();
  const auto progress = [&](const tstr::TrialResult& t) {
    if (o.quiet) return;
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    err << "trial " << t.trial << (t.failed ? " failed: " + t.error : " macro F1 " + std::to_string(t.macro.f1))
        << " (" << s << " s)\n";
  };
  const tstr::EvalReport report = tstr::run_tstr_trials(real, cfg.tstr_config(), hook, progress);
  ensure_parent(o.out);
  write_text(o.out, io::format_report(report));
  echo_config(cfg, o.out);
  out << "evaluated " << report.trials.size() << " trials (" << report.failed << " failed) -> " << o.out << '\n';
  return kExitOk;
}

int cmd_report(const Options& o, std::ostream& out) {
  std::ifstream in(o.in, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + o.in + "'");
  std::ostringstream text;
  text << in.rdbuf();
  const std::string formatted = io::format_report(io::parse_report(text.str(), o.top));
  if (o.out.empty())
    out << formatted;
  else
    write_text(o.out, formatted);
  return kExitOk;
}

int cmd_render(const Options& o, std::ostream& out) {
  const LabelledDataset ds = io::load_dataset(o.data);
  if (o.index >= ds.size())
    throw DataError("index " + std::to_string(o.index) + " out of range (" + std::to_string(ds.size()) + " items)");
  ensure_parent(o.out);
  io::render_png(ds.items[o.index], o.out);
  out << "rendered '" << ds.items[o.index].id << "' -> " << o.out << '\n';
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Heatmap folding, per-class WGAN training and train-synthetic/test-real evaluation", "foldgan"};
  app.require_subcommand(1, 1);
  Options o;

  auto* simulate = app.add_subcommand("simulate", "Simulate a labelled household dataset");
  simulate->add_option("--config", o.config, "Run configuration file")->check(CLI::ExistingFile);
  simulate->add_option("--out", o.out, "Output directory (dataset.csv, config.txt)")->required();
  simulate->add_option("--seed", o.seed, "Simulator seed (overrides sim.seed)");

  auto* fold_cmd = app.add_subcommand("fold", "Fold raw 1D series into a heatmap dataset");
  fold_cmd->add_option("--series", o.series, "Series CSV (id,label,sample_minutes,values...)")
      ->required()
      ->check(CLI::ExistingFile);
  fold_cmd->add_option("--out", o.out, "Output dataset CSV")->required();
  fold_cmd->add_option("--period", o.period, "Samples per period (default: samples per day)")
      ->check(CLI::PositiveNumber);
  fold_cmd->add_flag("--raw", o.raw, "Skip per-heatmap normalization");
  fold_cmd->add_option("--fit", o.fit, "Fit sides to multiples of 8")->check(CLI::IsMember({"none", "crop", "pad"}));

  auto* train = app.add_subcommand("train-gan", "Train one WGAN on a single class");
  train->add_option("--data", o.data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  train->add_option("--class", o.label, "Class label (0 non-pool, 1 pool)")->required()->check(CLI::Range(0, 1));
  train->add_option("--out", o.out, "Output checkpoint")->required();
  train->add_option("--config", o.config, "Run configuration file")->check(CLI::ExistingFile);
  train->add_option("--epochs", o.epochs, "Override gan.epochs");
  train->add_option("--seed", o.seed, "Override seed");
  train->add_option("--log", o.log, "Training log CSV (default <out>.log.csv)");
  train->add_flag("--keep-state", o.keep_state, "Store critic and optimizer state in the checkpoint");
  train->add_flag("--quiet", o.quiet, "No per-epoch progress");

  auto* generate = app.add_subcommand("generate", "Sample heatmaps from a checkpoint");
  generate->add_option("--ckpt", o.ckpt, "Checkpoint")->required()->check(CLI::ExistingFile);
  generate->add_option("--count", o.count, "Number of heatmaps")->capture_default_str()->check(CLI::PositiveNumber);
  generate->add_option("--out", o.out, "Output dataset CSV")->required();
  generate->add_option("--config", o.config, "Run configuration file (its seed is the sampling seed)")
      ->check(CLI::ExistingFile);
  generate->add_option("--seed", o.seed, "Override seed");

  auto* evaluate = app.add_subcommand("evaluate", "Run train-synthetic/test-real trials");
  evaluate->add_option("--real", o.real, "Real dataset CSV")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--config", o.config, "Run configuration file")->check(CLI::ExistingFile);
  evaluate->add_option("--trials", o.trials, "Override tstr.trials")->check(CLI::PositiveNumber);
  evaluate->add_option("--generated", o.generated, "Override tstr.generated_per_class")->check(CLI::PositiveNumber);
  evaluate->add_option("--threads", o.threads, "Override tstr.threads")->check(CLI::PositiveNumber);
  evaluate->add_option("--epochs", o.epochs, "Override gan.epochs");
  evaluate->add_option("--seed", o.seed, "Override seed");
  evaluate->add_option("--out", o.out, "Report file")->required();
  evaluate->add_flag("--oracle", o.oracle, "Use real training items instead of GAN samples (ceiling run)");
  evaluate->add_flag("--quiet", o.quiet, "No per-trial progress");

  auto* report = app.add_subcommand("report", "Re-aggregate the trial rows of a report");
  report->add_option("--in", o.in, "Report file")->required()->check(CLI::ExistingFile);
  report->add_option("--top", o.top, "Rows in the top table")->capture_default_str()->check(CLI::PositiveNumber);
  report->add_option("--out", o.out, "Output file (default stdout)");

  auto* render = app.add_subcommand("render", "Render one heatmap as a grayscale PNG");
  render->add_option("--data", o.data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  render->add_option("--index", o.index, "Item index")->required();
  render->add_option("--out", o.out, "Output PNG")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(o, out);
    if (fold_cmd->parsed()) return cmd_fold(o, out, err);
    if (train->parsed()) return cmd_train_gan(o, out, err);
    if (generate->parsed()) return cmd_generate(o, out);
    if (evaluate->parsed()) return cmd_evaluate(o, out, err);
    if (report->parsed()) return cmd_report(o, out);
    if (render->parsed()) return cmd_render(o, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace foldgan::cli
