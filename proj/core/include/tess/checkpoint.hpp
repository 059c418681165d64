#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tess/network.hpp"
#include "tess/optim.hpp"

namespace tess {

// Checkpoint container, little-endian throughout:
//   offset 0   char[8]  magic "TESSCKPT"
//   offset 8   u32      format version (1)
//   offset 12  u32      weighted layer count N
//   offset 16  f64      learning rate at save time
//   offset 24  u64      epoch
//   offset 32  N weight records: u32 rank, u64 extent[rank], f64 value[prod(extent)]
//   then       N optimizer records: u64 adam step, f64 m[...], f64 v[...] (weight extents)
//   then       u32 byte length L, char[L] RNG state (std::mt19937_64 text form)
// The file ends exactly after the RNG state.
inline constexpr char kCheckpointMagic[8] = {'T', 'E', 'S', 'S', 'C', 'K', 'P', 'T'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  std::vector<Tensor> weights;     // weighted layers only, in layer order
  std::vector<AdamState> moments;  // same order
  double learning_rate = 0;
  std::uint64_t epoch = 0;
  std::string rng_state;
};

std::vector<unsigned char> encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(const std::vector<unsigned char>& bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Snapshot of the weighted layers and their optimizer moments.
Checkpoint make_checkpoint(const Network& net, const std::vector<AdamState>& moments, double learning_rate,
                           std::uint64_t epoch, std::string rng_state);

/// Copies checkpoint weights (and moments, when given) into a network built
/// from the same stack. Throws ShapeError on any mismatch.
void restore_checkpoint(const Checkpoint& ckpt, Network& net, std::vector<AdamState>* moments = nullptr);

}  // namespace tess
