#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "tess/tensor.hpp"

namespace tess {

struct Sample {
  Tensor input;  // [T x frame_shape], values in [0, 1]
  std::size_t label = 0;
};

struct SpikeDataset {
  std::vector<Sample> samples;
  std::size_t class_count = 0;
  std::size_t time_steps = 0;
  Shape frame_shape;

  /// Throws ConfigError on out-of-range labels, values outside [0, 1] or
  /// samples whose extents disagree with (time_steps, frame_shape).
  void validate() const;
  std::size_t size() const noexcept { return samples.size(); }
};

struct DatasetSplits {
  SpikeDataset train;
  SpikeDataset val;
  SpikeDataset test;
};

Tensor one_hot(std::size_t label, std::size_t class_count);

/// Direct coding: the normalized image repeated at every one of `time_steps` steps.
Tensor encode_static(const Tensor& image, std::size_t time_steps);

// EVF1 container, little-endian:
//   offset 0   char[4]  magic "EVF1"
//   offset 4   u32      sample count
//   offset 8   u32      time steps T
//   offset 12  u32      height
//   offset 16  u32      width
//   offset 20  u32      channels
//   offset 24  u32      class count
//   offset 28  per sample: u8 label, then T*channels*height*width u8 values in
//              [t][c][y][x] order, scaled by 1/255 on load.
inline constexpr std::size_t kEvfHeaderBytes = 28;

SpikeDataset load_event_frames(const std::filesystem::path& path);
/// Frames must be [C, H, W]; values are clamped to [0, 1] and rounded to 1/255.
void save_event_frames(const std::filesystem::path& path, const SpikeDataset& dataset);

struct SynthTaskOptions {
  std::size_t classes = 2;
  Shape frame_shape = {64};  // {neurons} or {C, H, W}
  std::size_t time_steps = 10;
  double noise = 0.05;       // per-value flip probability
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
};

/// Each class gets a distinct random binary prototype raster [T x frame];
/// samples are prototypes with independent flip noise, shuffled with the
/// seed and split 80/10/10 into train/val/test.
DatasetSplits synth_pattern_task(const SynthTaskOptions& options);

/// Seeded shuffle followed by an 80/10/10 split.
DatasetSplits split_dataset(SpikeDataset dataset, std::uint64_t seed);

/// The class prototypes `synth_pattern_task` draws from, [T x frame] each.
std::vector<Tensor> synth_prototypes(const SynthTaskOptions& options);

// Static-image augmentations over [C, H, W] images. All are seed-driven and
// off by default in the training pipeline.
Tensor random_crop(const Tensor& image, std::size_t padding, std::mt19937_64& rng);
Tensor random_horizontal_flip(const Tensor& image, std::mt19937_64& rng);
Tensor cutout(const Tensor& image, std::size_t size, std::mt19937_64& rng);

}  // namespace tess
