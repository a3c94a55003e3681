#include "foldgan/io/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string_view>

#include "foldgan/io/format.hpp"

namespace foldgan::io {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename U>
U parse_unsigned(std::string_view s, const std::string& key) {
  U v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigError(key + ": '" + std::string(s) + "' is not a non-negative integer");
  return v;
}

double parse_real(std::string_view s, const std::string& key) {
  try {
    return parse_double(s, key);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

struct Entry {
  std::string key;
  std::function<void(std::string_view)> set;
  std::function<std::string()> get;
};

Entry size_entry(std::string key, std::size_t& ref) {
  return {key, [&ref, key](std::string_view v) { ref = parse_unsigned<std::size_t>(v, key); },
          [&ref] { return std::to_string(ref); }};
}

Entry u64_entry(std::string key, std::uint64_t& ref) {
  return {key, [&ref, key](std::string_view v) { ref = parse_unsigned<std::uint64_t>(v, key); },
          [&ref] { return std::to_string(ref); }};
}

Entry real_entry(std::string key, double& ref) {
  return {key, [&ref, key](std::string_view v) { ref = parse_real(v, key); }, [&ref] { return format_double(ref); }};
}

std::vector<Entry> entries(RunConfig& c) {
  std::vector<Entry> e;
  SimConfig& s = c.sim;
  e.push_back(size_entry("sim.P", s.P));
  e.push_back(size_entry("sim.D", s.D));
  e.push_back(size_entry("sim.n_households", s.n_households));
  e.push_back(real_entry("sim.pool_fraction", s.pool_fraction));
  e.push_back(real_entry("sim.base_mean", s.base_mean));
  e.push_back(real_entry("sim.noise_sigma", s.noise_sigma));
  e.push_back(real_entry("sim.peak_hour_morning", s.peak_hours.first));
  e.push_back(real_entry("sim.peak_hour_evening", s.peak_hours.second));
  e.push_back(real_entry("sim.peak_width", s.peak_width));
  e.push_back(real_entry("sim.scale_sigma", s.scale_sigma));
  e.push_back(real_entry("sim.pump_amplitude", s.pump_amplitude));
  e.push_back(size_entry("sim.pump_row_start", s.pump_rows.first));
  e.push_back(size_entry("sim.pump_row_end", s.pump_rows.second));
  e.push_back(size_entry("sim.pump_col_start", s.pump_cols.first));
  e.push_back(size_entry("sim.pump_col_end", s.pump_cols.second));
  e.push_back(real_entry("sim.pump_duty", s.pump_duty));
  e.push_back(real_entry("sim.label_noise", s.label_noise));
  e.push_back(u64_entry("sim.seed", s.seed));
  e.push_back(size_entry("gan.latent_dim", c.latent_dim));
  e.push_back(real_entry("gan.lr", c.gan.lr));
  e.push_back(real_entry("gan.lr_decay", c.gan.lr_decay));
  e.push_back(size_entry("gan.batch_size", c.gan.batch_size));
  e.push_back(size_entry("gan.epochs", c.gan.epochs));
  e.push_back(real_entry("gan.lambda_gp", c.gan.lambda_gp));
  e.push_back(size_entry("gan.n_critic", c.gan.n_critic));
  e.push_back(real_entry("gan.beta1", c.gan.beta1));
  e.push_back(real_entry("gan.beta2", c.gan.beta2));
  e.push_back({"gan.fit",
               [&c](std::string_view v) {
                 if (v == "crop")
                   c.fit = wgan::FitMode::crop;
                 else if (v == "pad")
                   c.fit = wgan::FitMode::pad;
                 else
                   throw ConfigError("gan.fit: expected crop or pad, got '" + std::string(v) + "'");
               },
               [&c] { return std::string(c.fit == wgan::FitMode::crop ? "crop" : "pad"); }});
  e.push_back(size_entry("classifier.epochs", c.classifier.epochs));
  e.push_back(size_entry("classifier.batch_size", c.classifier.batch_size));
  e.push_back(real_entry("classifier.lr", c.classifier.lr));
  e.push_back(size_entry("tstr.trials", c.trials));
  e.push_back(size_entry("tstr.generated_per_class", c.generated_per_class));
  e.push_back(real_entry("tstr.train_ratio", c.train_ratio));
  e.push_back(size_entry("tstr.threads", c.threads));
  e.push_back(u64_entry("seed", c.seed));
  return e;
}

}  // namespace

tstr::TstrConfig RunConfig::tstr_config() const {
  tstr::TstrConfig t;
  t.n_trials = trials;
  t.n_generated_per_class = generated_per_class;
  t.train_ratio = train_ratio;
  t.classifier = classifier;
  t.seed = seed;
  t.threads = threads;
  return t;
}

void RunConfig::validate() const {
  sim.validate();
  gan.validate();
  wgan::GanArch{latent_dim, sim.P, sim.D}.validate();
  tstr_config().validate();
}

RunConfig default_run_config() {
  RunConfig c;
  if (const char* env = std::getenv(kSeedEnv)) {
    try {
      c.seed = parse_unsigned<std::uint64_t>(trim(env), kSeedEnv);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("environment ") + e.what());
    }
  }
  return c;
}

RunConfig parse_run_config(const std::string& text, RunConfig base) {
  RunConfig c = base;
  auto table = entries(c);
  std::set<std::string, std::less<>> seen;
  std::istringstream in(text);
  std::string raw;
  for (std::size_t line_no = 1; std::getline(in, raw); ++line_no) {
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const std::string where = "config line " + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + "expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto it = std::find_if(table.begin(), table.end(), [&](const Entry& e) { return e.key == key; });
    if (it == table.end()) throw ConfigError(where + "unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError(where + "key '" + key + "' given twice");
    try {
      it->set(value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_run_config(text.str());
}

std::string format_run_config(const RunConfig& cfg) {
  RunConfig copy = cfg;
  std::string out;
  for (const Entry& e : entries(copy)) out += e.key + " = " + e.get() + "\n";
  return out;
}

void save_run_config(const RunConfig& cfg, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << format_run_config(cfg);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

std::vector<std::string> run_config_keys() {
  RunConfig c;
  std::vector<std::string> keys;
  for (const Entry& e : entries(c)) keys.push_back(e.key);
  return keys;
}

}  // namespace foldgan::io
