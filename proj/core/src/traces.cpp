#include "tess/traces.hpp"

#include "tess/errors.hpp"
#include "tess/ops.hpp"

namespace tess {

void TraceParams::validate() const {
  if (!(lambda_pre >= 0 && lambda_pre < 1)) throw ConfigError("trace.lambda_pre must lie in [0, 1)");
  if (!(lambda_post >= 0 && lambda_post < 1)) throw ConfigError("trace.lambda_post must lie in [0, 1)");
  if (alpha_post != -1 && alpha_post != 0 && alpha_post != 1) {
    throw ConfigError("trace.alpha_post must be -1, 0 or +1");
  }
}

TraceState TraceState::zeros(const Shape& input_shape, const Shape& output_shape, const TraceParams& params) {
  TraceState s;
  s.q = Tensor(input_shape);
  if (params.post_enabled()) s.h = Tensor(output_shape);
  return s;
}

Tensor FactorPair::materialize() const { return outer(post, pre); }

void update_q_inplace(TraceState& state, const Tensor& input_spikes, const TraceParams& params) {
  require_same_shape(state.q, input_spikes, "update_q");
  for (std::size_t i = 0; i < state.q.size(); ++i) {
    state.q[i] = params.lambda_pre * state.q[i] + input_spikes[i];
  }
}

void update_h_inplace(TraceState& state, const Tensor& psi_prev, const TraceParams& params) {
  if (!params.post_enabled()) return;
  require_same_shape(state.h, psi_prev, "update_h");
  for (std::size_t i = 0; i < state.h.size(); ++i) {
    state.h[i] = params.lambda_post * state.h[i] + psi_prev[i];
  }
}

TraceState update_q(TraceState state, const Tensor& input_spikes, const TraceParams& params) {
  update_q_inplace(state, input_spikes, params);
  return state;
}

TraceState update_h(TraceState state, const Tensor& psi_prev, const TraceParams& params) {
  update_h_inplace(state, psi_prev, params);
  return state;
}

FactorPair eligibility_pre(const Tensor& psi_now, const Tensor& q, const TraceParams& params) {
  return {scaled(psi_now, params.alpha_pre), q};
}

FactorPair eligibility_post(const Tensor& h, const Tensor& input_spikes, const TraceParams& params) {
  if (!params.post_enabled() || h.empty()) {
    return {Tensor(h.shape()), input_spikes};
  }
  return {scaled(h, params.alpha_post), input_spikes};
}

}  // namespace tess
