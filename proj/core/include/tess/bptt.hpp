#pragma once

#include <cstddef>
#include <vector>

#include "tess/network.hpp"

namespace tess {

/// Forward nonlinearity used by the oracle. `heaviside` is the real spiking
/// network with psi standing in for the Heaviside derivative. `smooth` replaces
/// the spike by the antiderivative of psi, so the oracle's backward pass is the
/// exact gradient of that smoothed network and can be checked by finite
/// differences.
enum class SpikeFunction { heaviside, smooth };

struct BpttLimits {
  std::size_t max_neurons = 64;  // LIF units summed over all layers, input excluded
  std::size_t max_steps = 10;
};

struct BpttResult {
  Real loss = 0;
  std::vector<Tensor> gradients;  // indexed like Network::layers()
};

/// Antiderivative of psi: 0 below v_th - 1, psi_amplitude above v_th + 1.
Real smooth_spike(Real u, const LifParams& params);

/// Cross-entropy of softmax(sum_t B_head o_L[t]) against `target`.
Real bptt_loss(const Network& net, const Tensor& input, const Tensor& target,
               SpikeFunction spike = SpikeFunction::heaviside);

/// Full backpropagation through time over a dense-only network, using
///   dL/du[t] = dL/do[t] psi(u[t]) + dL/du[t+1] * gamma * (1 - v_th psi(u[t]))
/// where dL/do[t] collects the next layer (or the readout) at the same step.
/// Refuses networks beyond `limits`: this is a desk-scale reference only.
BpttResult bptt_oracle_gradients(const Network& net, const Tensor& input, const Tensor& target,
                                 SpikeFunction spike = SpikeFunction::heaviside, const BpttLimits& limits = {});

}  // namespace tess
