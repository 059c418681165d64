#pragma once

#include <cstddef>
#include <optional>

#include "tess/counters.hpp"
#include "tess/lif.hpp"
#include "tess/lsg.hpp"
#include "tess/ops.hpp"
#include "tess/traces.hpp"

namespace tess {

/// Sum of per-step weight deltas for one layer over one sequence. Steps with
/// t <= learn_start contribute nothing, so delta_w stays zero until then.
struct LayerUpdateAccumulator {
  Tensor delta_w;
  std::size_t learn_start = 0;
  std::size_t step_count = 0;

  static LayerUpdateAccumulator zeros(const Shape& weight_shape, std::size_t learn_start) {
    return {Tensor(weight_shape), learn_start, 0};
  }
  void reset() {
    delta_w.fill(0);
    step_count = 0;
  }
};

/// Everything a layer carries across time steps.
struct LayerStepState {
  LifLayerState lif;
  TraceState trace;
  LayerUpdateAccumulator acc;
};

/// Read-only view of one weighted layer. This is all the step may consult
/// besides its own state, the previous layer's spikes and the target.
struct LayerContext {
  const Tensor& weights;
  const std::optional<ConvGeometry>& conv;  // nullopt for dense layers
  const BasisMatrix& basis;
  const LifParams& lif;
  const TraceParams& trace;
  Task task = Task::classification;
};

/// Weighted input of a layer: W x for dense layers, the convolution otherwise.
Tensor synaptic_input(const Tensor& weights, const std::optional<ConvGeometry>& conv, const Tensor& input);

/// One step of the local rule for a single layer, in this order:
///   1. h <- lambda_post h + psi(u[t-1])
///   2. LIF integration and firing
///   3. q <- lambda_pre q + input
///   4. when t > learn_start: m = B^T(f(B o) - y), then
///      acc += (m . alpha_pre psi(u[t])) (x) q + (m . alpha_post h) (x) input
/// `t` counts from 1. Returns the layer's output spikes.
Tensor tess_layer_step(const LayerContext& layer, LayerStepState& state, const Tensor& input_spikes,
                       const Tensor& target, std::size_t t, OpCounters* counters = nullptr);

enum class UpdateDirection {
  descent,     // W - lr * acc: m is a prediction-minus-target error, so this lowers the loss
  as_written,  // W + lr * acc, literal replay of the pseudo-code
};

Tensor apply_update(Tensor weights, const Tensor& acc, Real learning_rate,
                    UpdateDirection direction = UpdateDirection::descent);

}  // namespace tess
