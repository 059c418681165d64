#pragma once

#include "tess/tensor.hpp"

namespace tess {

struct LifParams {
  Real gamma = 0.5;          // membrane leak, in [0, 1]
  Real v_th = 0.6;           // firing threshold, > 0
  Real psi_amplitude = 0.3;  // peak of the triangular secondary activation, > 0

  void validate() const;
  bool operator==(const LifParams&) const = default;
};

/// Membrane potentials and the spikes emitted on the previous step.
struct LifLayerState {
  Tensor u;
  Tensor o_prev;

  static LifLayerState zeros(const Shape& shape) { return {Tensor(shape), Tensor(shape)}; }
};

struct LifStepResult {
  LifLayerState state;
  Tensor spikes;
};

/// One discrete LIF update with subtractive reset:
///   u' = gamma * (u - v_th * o_prev) + synaptic_input
///   o  = 1 if u' > v_th else 0
/// `synaptic_input` is the already-weighted sum; no weights are applied here.
/// The state is taken by value so callers can move it through the step.
LifStepResult lif_step(LifLayerState state, const Tensor& synaptic_input, const LifParams& params);

/// Triangular secondary activation psi_amplitude * max(1 - |u - v_th|, 0).
Tensor psi(const Tensor& u, const LifParams& params);
Real psi(Real u, const LifParams& params);

}  // namespace tess
