#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "tess/counters.hpp"
#include "tess/data.hpp"
#include "tess/network.hpp"
#include "tess/optim.hpp"

namespace tess {

enum class UpdateMode {
  per_sequence,  // accumulate over the sequence, average over the batch, one Adam step
  per_step,      // one Adam step after every time step, samples advanced in lockstep
};

struct TrainOptions {
  AdamHyper adam;
  UpdateDirection direction = UpdateDirection::descent;
  UpdateMode mode = UpdateMode::per_sequence;
  std::size_t threads = 1;  // per-sequence mode only; reduction order is fixed
};

/// Adam moments for every weighted layer of a network.
class NetworkOptimizer {
 public:
  explicit NetworkOptimizer(const Network& net);

  /// Applies one Adam step per weighted layer. `grads` is indexed like the
  /// layers and holds gradient-like deltas (the sign of the local rule).
  /// Throws NumericError if a weight becomes non-finite.
  void apply(Network& net, const std::vector<Tensor>& grads, const AdamHyper& hyper, UpdateDirection direction,
             OpCounters* counters = nullptr);

  std::vector<AdamState>& states() noexcept { return states_; }
  const std::vector<AdamState>& states() const noexcept { return states_; }
  std::uint64_t steps() const noexcept { return steps_; }
  void set_steps(std::uint64_t steps) noexcept { steps_ = steps; }

 private:
  std::vector<AdamState> states_;  // empty tensors for avgpool entries
  std::uint64_t steps_ = 0;
};

struct SequenceReport {
  std::vector<Real> update_norms;  // l2 norm of each layer's applied delta
  OpCounters counters;
  std::size_t learning_steps = 0;  // steps that produced a learning signal, per layer
  bool empty_window = false;       // learn_start >= T: nothing was learned
};

/// Single sample, single forward sweep: every layer runs the local rule at every
/// step, then the accumulated deltas are applied through Adam.
SequenceReport train_sequence(Network& net, NetworkOptimizer& optimizer, const Tensor& input, const Tensor& target,
                              const TrainOptions& options);

struct BatchReport {
  OpCounters counters;
  std::size_t samples = 0;
  std::size_t trace_scalars = 0;  // allocated per sample
  bool empty_window = false;
};

BatchReport train_batch(Network& net, NetworkOptimizer& optimizer, std::span<const Sample> batch,
                        const TrainOptions& options);

struct EvalResult {
  Real loss = 0;      // mean cross-entropy of the time-averaged readout
  Real accuracy = 0;  // fraction of argmax hits
  std::size_t count = 0;
};

EvalResult evaluate(const Network& net, const SpikeDataset& dataset);

struct EpochReport {
  OpCounters counters;
  std::size_t batches = 0;
  std::size_t trace_scalars = 0;
  bool empty_window = false;
};

/// Shuffles with `rng`, then trains batch by batch.
EpochReport train_epoch(Network& net, NetworkOptimizer& optimizer, const SpikeDataset& train, std::size_t batch_size,
                        std::mt19937_64& rng, const TrainOptions& options);

}  // namespace tess
