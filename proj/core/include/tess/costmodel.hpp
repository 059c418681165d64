#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tess/network.hpp"

namespace tess {

/// One neuron layer of an architecture as seen by the cost model. Conv layers
/// enter with their output activation count and their connection count
/// (outputs x kernel fan-in), so the dense n*n terms generalize.
struct LayerCost {
  std::string name;
  std::uint64_t neurons = 0;
  std::uint64_t inputs = 0;  // scalars arriving at the layer (after any pooling)
  std::uint64_t connections = 0;
};

struct ArchDescriptor {
  std::uint64_t input_neurons = 0;  // n^(0)
  std::vector<LayerCost> layers;    // n^(1) .. n^(L)
  std::uint64_t time_steps = 1;
  std::uint64_t learn_start = 0;
  std::uint64_t class_count = 1;

  /// Throws ConfigError on zero counts or learn_start > time_steps.
  void validate() const;
  std::uint64_t total_neurons() const;  // sum over l = 0..L
  std::uint64_t total_connections() const;
};

/// Builds a descriptor from a layer stack. Pool layers fold into the next
/// layer's input count and contribute no neurons.
ArchDescriptor describe_architecture(const std::vector<LayerSpec>& specs, const Shape& input_shape,
                                     std::size_t class_count, std::size_t time_steps, std::size_t learn_start);

enum class LearningRule { bptt, s_tllr, tess };

std::string rule_name(LearningRule rule);
LearningRule parse_rule(const std::string& text);

enum class MemoryAccounting {
  formula,  // factor * sum_{l=0..L} n^(l)
  exact,    // TESS only: per layer, pre trace over its inputs plus post trace over its outputs
};

struct CostEntry {
  std::string name;
  std::uint64_t value = 0;
};

struct CostReport {
  LearningRule rule = LearningRule::tess;
  std::string quantity;  // "macs" or "memory"
  std::vector<CostEntry> entries;
  std::uint64_t total = 0;
  std::size_t bytes_per_scalar = 4;

  std::uint64_t bytes() const { return total * bytes_per_scalar; }
  double mebibytes() const { return static_cast<double>(bytes()) / (1024.0 * 1024.0); }
};

/// Learning memory in scalars:
///   bptt   T * sum n
///   s-tllr 2 * sum n
///   tess   2 * sum n, or 1 * sum n when alpha_post is zero
CostReport mem_cost(const ArchDescriptor& arch, LearningRule rule, bool alpha_post_nonzero,
                    MemoryAccounting accounting = MemoryAccounting::formula, std::size_t bytes_per_scalar = 4);

/// MACs spent producing learning signals over one sequence:
///   bptt   T * sum_{l>=1} conn(l)
///   s-tllr (T - t_l) * sum_{l>=1} conn(l)
///   tess   (T - t_l) * sum_{l>=1} 2 * n^(l) * C
CostReport mac_cost(const ArchDescriptor& arch, LearningRule rule);

struct ComplexityRow {
  std::string method;
  std::string memory_class;
  std::string time_class;
  bool temporal_local = false;
  bool spatial_local = false;
  bool executable = false;  // only BPTT, S-TLLR and TESS have concrete formulas here
  double memory_value = 0;  // the O-class evaluated on the architecture
  double time_value = 0;
};

/// Eight rows, BPTT through TESS. Symbols are evaluated with L*n -> sum n,
/// L*n^2 -> sum conn and C -> class count, over the neuron layers 1..L.
std::vector<ComplexityRow> complexity_table(const ArchDescriptor& arch);

}  // namespace tess
