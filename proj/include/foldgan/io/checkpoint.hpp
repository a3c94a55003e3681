#pragma once

// Binary checkpoint layout, all integers and floats little-endian:
//   "FGAN"  u32 version
//   u64 P, u64 D, u64 latent_dim
//   i32 class_label, u64 epochs_completed, u64 seed
//   tensor list (generator)
//   u8 has_training; if 1: tensor list (critic), then for the generator and
//   the critic optimizer: u64 steps, f64 lr, tensor list (first moments),
//   tensor list (second moments)
// A tensor list is u32 count, then per tensor u32 name length, name bytes,
// u32 rank, rank x u64 dims, f32 data.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "foldgan/wgan.hpp"

namespace foldgan::io {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<std::uint8_t> encode_checkpoint(const wgan::GanCheckpoint& ckpt);

/// Throws CheckpointError: "not a checkpoint" for a wrong magic, a version
/// message for other format versions, and a truncation message naming the
/// tensor being read.
wgan::GanCheckpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(const wgan::GanCheckpoint& ckpt, const std::string& path);
wgan::GanCheckpoint load_checkpoint(const std::string& path);

}  // namespace foldgan::io
