#include "tess/learning.hpp"

#include "tess/errors.hpp"

namespace tess {

Tensor synaptic_input(const Tensor& weights, const std::optional<ConvGeometry>& conv, const Tensor& input) {
  if (conv) return conv2d_forward(weights, input, *conv);
  return matvec(weights, input);
}

namespace {

void accumulate(Tensor& acc, const std::optional<ConvGeometry>& conv, const Tensor& post, const Tensor& pre) {
  if (conv) {
    conv2d_accumulate_update(acc, post, pre, *conv);
  } else {
    accumulate_outer(acc, post, pre);
  }
}

}  // namespace

Tensor tess_layer_step(const LayerContext& layer, LayerStepState& state, const Tensor& input_spikes,
                       const Tensor& target, std::size_t t, OpCounters* counters) {
  if (t == 0) throw ConfigError("tess_layer_step: time steps are counted from 1");
  if (state.acc.delta_w.shape() != layer.weights.shape()) {
    throw ShapeError("tess_layer_step: accumulator " + shape_string(state.acc.delta_w.shape()) +
                     " does not match weights " + shape_string(layer.weights.shape()));
  }

  if (layer.trace.post_enabled()) update_h_inplace(state.trace, psi(state.lif.u, layer.lif), layer.trace);

  Tensor current = synaptic_input(layer.weights, layer.conv, input_spikes);
  auto stepped = lif_step(std::move(state.lif), current, layer.lif);
  state.lif = std::move(stepped.state);
  if (counters != nullptr) ++counters->lif_steps;

  update_q_inplace(state.trace, input_spikes, layer.trace);

  if (t > state.acc.learn_start) {
    const LearningSignal signal = learning_signal(layer.basis, stepped.spikes, target, layer.task, counters);
    const Tensor psi_now = psi(state.lif.u, layer.lif);

    FactorPair causal = eligibility_pre(psi_now, state.trace.q, layer.trace);
    for (std::size_t i = 0; i < causal.post.size(); ++i) causal.post[i] *= signal.m[i];
    accumulate(state.acc.delta_w, layer.conv, causal.post, causal.pre);

    if (layer.trace.post_enabled()) {
      FactorPair non_causal = eligibility_post(state.trace.h, input_spikes, layer.trace);
      for (std::size_t i = 0; i < non_causal.post.size(); ++i) non_causal.post[i] *= signal.m[i];
      accumulate(state.acc.delta_w, layer.conv, non_causal.post, non_causal.pre);
    }
    ++state.acc.step_count;
  }
  return std::move(stepped.spikes);
}

Tensor apply_update(Tensor weights, const Tensor& acc, Real learning_rate, UpdateDirection direction) {
  const Real sign = direction == UpdateDirection::descent ? Real{-1} : Real{1};
  axpy_inplace(weights, sign * learning_rate, acc);
  return weights;
}

}  // namespace tess
