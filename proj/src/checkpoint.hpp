#pragma once

// Binary sampler checkpoint, little-endian.  Layout (version 1):
//
//   char[8]  magic "ZILRCKPT"
//   u32      version
//   u64      config hash (see config_hash)
//   u64      completed iterations
//   u32 M, u32 n, u32 d, u32 p
//   M x { f64 temperature; f64[d] beta; f64[p] gamma; u8[n] h;
//         u32 len; char[len] rng state (std::mt19937_64 text form) }
//   u32 len; char[len] swap rng state
//   (M-1) x { i64 attempts; i64 accepts }
//   u64 rows, u64 cols, f64[rows*cols] draw buffer (row-major)
//   f64[rows] log-likelihood buffer
//
// The draw buffers are stored at full (total_iters - burn_in) size; rows past
// the completed iteration count are zero.

#include <cstdint>
#include <filesystem>
#include <vector>

#include "zilr/gibbs.hpp"

namespace zilr {

struct SamplerSnapshot {
  int completed = 0;
  std::vector<ReplicaState> states;
  Rng swap_rng;
  std::vector<std::int64_t> swap_attempts;
  std::vector<std::int64_t> swap_accepts;
  Matrix draws;
  Vector loglik;
};

void write_checkpoint(const std::filesystem::path& path, std::uint64_t hash, const Dataset& data,
                      const SamplerSnapshot& snap);

SamplerSnapshot read_checkpoint(const std::filesystem::path& path, std::uint64_t expected_hash,
                                const Dataset& data);

}  // namespace zilr
