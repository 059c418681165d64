#pragma once

#include <cstddef>

#include "tess/tensor.hpp"

namespace tess {

struct TraceParams {
  Real lambda_pre = 0.5;   // pre-synaptic trace decay, in [0, 1)
  Real lambda_post = 0.2;  // post-synaptic trace decay, in [0, 1)
  Real alpha_pre = 1.0;    // causal term amplitude
  Real alpha_post = 1.0;   // non-causal term: -1, 0 or +1

  void validate() const;
  bool post_enabled() const noexcept { return alpha_post != 0; }
  bool operator==(const TraceParams&) const = default;
};

/// Forward-in-time traces of one layer. `q` follows the layer input; `h`
/// follows the layer output and stays unallocated while alpha_post == 0.
struct TraceState {
  Tensor q;
  Tensor h;

  static TraceState zeros(const Shape& input_shape, const Shape& output_shape, const TraceParams& params);
  /// Scalars held by the traces, the quantity the memory audit counts.
  std::size_t scalar_count() const noexcept { return q.size() + h.size(); }
};

/// Deferred outer product `post (x) pre`. Kept factored in the training path so
/// eligibility storage stays linear in the neuron count.
struct FactorPair {
  Tensor post;
  Tensor pre;

  /// Dense [post.size(), pre.size()] matrix. Diagnostics and tests only.
  Tensor materialize() const;
};

/// q' = lambda_pre * q + input_spikes.
TraceState update_q(TraceState state, const Tensor& input_spikes, const TraceParams& params);
/// h' = lambda_post * h + psi_prev, where psi_prev is the secondary activation of
/// the previous step's membrane. No-op while alpha_post == 0.
TraceState update_h(TraceState state, const Tensor& psi_prev, const TraceParams& params);

void update_q_inplace(TraceState& state, const Tensor& input_spikes, const TraceParams& params);
void update_h_inplace(TraceState& state, const Tensor& psi_prev, const TraceParams& params);

/// Causal factor pair (alpha_pre * psi_now, q).
FactorPair eligibility_pre(const Tensor& psi_now, const Tensor& q, const TraceParams& params);
/// Non-causal factor pair (alpha_post * h, input_spikes); zero post factor when alpha_post == 0.
FactorPair eligibility_post(const Tensor& h, const Tensor& input_spikes, const TraceParams& params);

}  // namespace tess
