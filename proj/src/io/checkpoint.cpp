#include "foldgan/io/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace foldgan::io {

namespace {

constexpr char kMagic[4] = {'F', 'G', 'A', 'N'};
constexpr std::uint32_t kMaxRank = 8;

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  template <typename U>
  void uint(U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) { uint(v); }
  void u64(std::uint64_t v) { uint(v); }
  void i32(std::int32_t v) { uint(static_cast<std::uint32_t>(v)); }
  void f64(double v) { uint(std::bit_cast<std::uint64_t>(v)); }

  void tensors(const std::vector<wgan::NamedTensor>& list) {
    u32(static_cast<std::uint32_t>(list.size()));
    for (const auto& t : list) {
      u32(static_cast<std::uint32_t>(t.name.size()));
      bytes(t.name.data(), t.name.size());
      u32(static_cast<std::uint32_t>(t.shape.size()));
      for (const std::size_t d : t.shape) u64(d);
      if (nn::shape_size(t.shape) != t.data.size())
        throw CheckpointError("tensor '" + t.name + "' data does not match its shape");
      for (const float v : t.data) u32(std::bit_cast<std::uint32_t>(v));
    }
  }

  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& in) : in_(in) {}

  void set_context(std::string ctx) { context_ = std::move(ctx); }

  const std::uint8_t* take(std::size_t n) {
    if (in_.size() - pos_ < n) throw CheckpointError("checkpoint truncated while reading " + context_);
    const std::uint8_t* p = in_.data() + pos_;
    pos_ += n;
    return p;
  }
  template <typename U>
  U uint() {
    const std::uint8_t* p = take(sizeof(U));
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(p[i]) << (8 * i);
    return v;
  }
  std::uint8_t u8() { return *take(1); }
  std::uint32_t u32() { return uint<std::uint32_t>(); }
  std::uint64_t u64() { return uint<std::uint64_t>(); }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }

  std::vector<wgan::NamedTensor> tensors(const std::string& section) {
    set_context(section + " tensor count");
    const std::uint32_t count = u32();
    std::vector<wgan::NamedTensor> out;
    for (std::uint32_t i = 0; i < count; ++i) {
      wgan::NamedTensor t;
      set_context(section + " tensor #" + std::to_string(i) + " name");
      const std::uint32_t len = u32();
      const std::uint8_t* name = take(len);
      t.name.assign(reinterpret_cast<const char*>(name), len);
      set_context("tensor '" + t.name + "' (" + section + ")");
      const std::uint32_t rank = u32();
      if (rank == 0 || rank > kMaxRank) throw CheckpointError("tensor '" + t.name + "' has invalid rank");
      std::size_t count_elems = 1;
      for (std::uint32_t d = 0; d < rank; ++d) {
        const std::uint64_t dim = u64();
        if (dim == 0 || dim > (in_.size() / 4 + 1)) throw CheckpointError("tensor '" + t.name + "' has invalid dims");
        t.shape.push_back(static_cast<std::size_t>(dim));
        count_elems *= static_cast<std::size_t>(dim);
        if (count_elems > in_.size()) throw CheckpointError("tensor '" + t.name + "' is larger than the file");
      }
      const std::uint8_t* p = take(count_elems * 4);
      t.data.resize(count_elems);
      for (std::size_t k = 0; k < count_elems; ++k) {
        std::uint32_t bits = 0;
        for (std::size_t b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(p[4 * k + b]) << (8 * b);
        t.data[k] = std::bit_cast<float>(bits);
      }
      out.push_back(std::move(t));
    }
    return out;
  }

  bool at_end() const { return pos_ == in_.size(); }

 private:
  const std::vector<std::uint8_t>& in_;
  std::size_t pos_ = 0;
  std::string context_ = "header";
};

void write_optimizer(Writer& w, const wgan::OptimizerState& s) {
  w.u64(s.steps);
  w.f64(s.lr);
  w.tensors(s.first_moments);
  w.tensors(s.second_moments);
}

wgan::OptimizerState read_optimizer(Reader& r, const std::string& which) {
  wgan::OptimizerState s;
  r.set_context(which + " optimizer header");
  s.steps = r.u64();
  s.lr = r.f64();
  s.first_moments = r.tensors(which + " first moments");
  s.second_moments = r.tensors(which + " second moments");
  return s;
}

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const wgan::GanCheckpoint& ckpt) {
  Writer w;
  w.bytes(kMagic, 4);
  w.u32(ckpt.format_version);
  w.u64(ckpt.arch.P);
  w.u64(ckpt.arch.D);
  w.u64(ckpt.arch.latent_dim);
  w.i32(ckpt.class_label);
  w.u64(ckpt.epochs_completed);
  w.u64(ckpt.seed);
  w.tensors(ckpt.generator);
  w.u8(ckpt.training ? 1 : 0);
  if (ckpt.training) {
    w.tensors(ckpt.training->critic);
    write_optimizer(w, ckpt.training->generator_opt);
    write_optimizer(w, ckpt.training->critic_opt);
  }
  return w.take();
}

wgan::GanCheckpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) throw CheckpointError("not a checkpoint");
  Reader r(bytes);
  r.take(4);
  wgan::GanCheckpoint ckpt;
  ckpt.format_version = r.u32();
  if (ckpt.format_version != wgan::GanCheckpoint::kFormatVersion)
    throw CheckpointError("unsupported checkpoint version " + std::to_string(ckpt.format_version) + " (expected " +
                          std::to_string(wgan::GanCheckpoint::kFormatVersion) + ")");
  ckpt.arch.P = r.u64();
  ckpt.arch.D = r.u64();
  ckpt.arch.latent_dim = r.u64();
  ckpt.class_label = r.i32();
  ckpt.epochs_completed = r.u64();
  ckpt.seed = r.u64();
  ckpt.generator = r.tensors("generator");
  r.set_context("training flag");
  const std::uint8_t has_training = r.u8();
  if (has_training > 1) throw CheckpointError("corrupt training flag");
  if (has_training) {
    wgan::TrainingState t;
    t.critic = r.tensors("critic");
    t.generator_opt = read_optimizer(r, "generator");
    t.critic_opt = read_optimizer(r, "critic");
    ckpt.training = std::move(t);
  }
  if (!r.at_end()) throw CheckpointError("trailing bytes after checkpoint");
  try {
    ckpt.arch.validate();
  } catch (const ConfigError& e) {
    throw CheckpointError(std::string("checkpoint architecture: ") + e.what());
  }
  return ckpt;
}

void save_checkpoint(const wgan::GanCheckpoint& ckpt, const std::string& path) {
  const auto bytes = encode_checkpoint(ckpt);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

wgan::GanCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_checkpoint(bytes);
  } catch (const CheckpointError& e) {
    throw CheckpointError(path + ": " + e.what());
  }
}

}  // namespace foldgan::io
