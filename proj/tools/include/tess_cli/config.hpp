#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "tess/costmodel.hpp"
#include "tess/network.hpp"
#include "tess/trainer.hpp"

namespace tess::cli {

// Plain-text run configuration:
//
//   # comment
//   trace.lambda_pre = 0.5
//   train.epochs = 20
//
// One `key = value` per line, dotted keys, unknown keys rejected. Every key has
// a default, listed by `RunConfig::keys()`.
struct RunConfig {
  std::string preset = "toy-dense";
  std::string layers;  // explicit stack, e.g. "conv:8:3:1:1,avgpool:2,dense:C"; overrides preset
  LifParams lif;
  TraceParams trace;
  AdamHyper adam;
  std::size_t sched_patience = 5;
  double sched_factor = 0.5;
  std::size_t learn_start = 0;
  UpdateMode mode = UpdateMode::per_sequence;
  UpdateDirection direction = UpdateDirection::descent;
  Task task = Task::classification;
  BasisKind hidden_basis = BasisKind::square_wave;
  BasisKind head_basis = BasisKind::identity;
  std::string dataset = "synth:2x64x10";
  std::size_t epochs = 20;
  std::size_t batch_size = 16;
  std::size_t threads = 1;
  std::uint64_t seed = 7;
  std::string out_dir = "runs/default";
  bool wall_time = false;  // when false the metrics wall_seconds column is 0, keeping reruns byte-identical

  /// Sets one field from its textual form. Throws ConfigError.
  void set(const std::string& key, const std::string& value);
  std::string get(const std::string& key) const;
  static const std::vector<std::string>& keys();

  /// Sorted `key = value` lines covering every key.
  std::string serialize() const;

  NetworkOptions network_options(std::size_t class_count) const;
  TrainOptions train_options() const;
  std::vector<LayerSpec> layer_specs(std::size_t class_count) const;
};

/// Applies `key = value` lines on top of `base`. Errors name the line:
/// "config line 3: unknown key 'x.y'".
RunConfig parse_config(const std::string& text, RunConfig base = {}, const std::string& origin = "config");
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// "k=v" override. Throws ConfigError naming the override on failure.
void apply_override(RunConfig& config, const std::string& assignment);

/// Parses "dense:128,conv:8:3:1:1,avgpool:2,dense:C". `C` stands for the class count.
std::vector<LayerSpec> parse_layer_list(const std::string& text, std::size_t class_count);

std::string format_real(double value);

}  // namespace tess::cli
