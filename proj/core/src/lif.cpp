#include "tess/lif.hpp"

#include <algorithm>
#include <cmath>

#include "tess/errors.hpp"

namespace tess {

void LifParams::validate() const {
  if (!(gamma >= 0 && gamma <= 1)) throw ConfigError("lif.gamma must lie in [0, 1]");
  if (!(v_th > 0)) throw ConfigError("lif.v_th must be positive");
  if (!(psi_amplitude > 0)) throw ConfigError("lif.psi_amplitude must be positive");
}

LifStepResult lif_step(LifLayerState state, const Tensor& synaptic_input, const LifParams& params) {
  require_same_shape(state.u, synaptic_input, "lif_step input");
  require_same_shape(state.u, state.o_prev, "lif_step state");
  require_finite(synaptic_input, "lif_step input");

  Tensor spikes(state.u.shape());
  for (std::size_t i = 0; i < state.u.size(); ++i) {
    const Real u = params.gamma * (state.u[i] - params.v_th * state.o_prev[i]) + synaptic_input[i];
    state.u[i] = u;
    // Heaviside with theta(0) = 0: reaching the threshold exactly does not fire.
    spikes[i] = u > params.v_th ? Real{1} : Real{0};
  }
  require_finite(state.u, "lif_step membrane");
  state.o_prev = spikes;
  return {std::move(state), std::move(spikes)};
}

Real psi(Real u, const LifParams& params) {
  return params.psi_amplitude * std::max(Real{1} - std::abs(u - params.v_th), Real{0});
}

Tensor psi(const Tensor& u, const LifParams& params) {
  Tensor out(u.shape());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = psi(u[i], params);
  return out;
}

}  // namespace tess
