#include "tess/bptt.hpp"

#include <cmath>

#include "tess/errors.hpp"

namespace tess {

Real smooth_spike(Real u, const LifParams& params) {
  const Real d = u - params.v_th;
  Real s;
  if (d <= -1) {
    s = 0;
  } else if (d <= 0) {
    s = (d + 1) * (d + 1) / 2;
  } else if (d < 1) {
    s = 1 - (1 - d) * (1 - d) / 2;
  } else {
    s = 1;
  }
  return params.psi_amplitude * s;
}

namespace {

struct Unrolled {
  // [layer][t] tensors, t = 0 .. T-1
  std::vector<std::vector<Tensor>> inputs;
  std::vector<std::vector<Tensor>> membranes;
  std::vector<std::vector<Tensor>> spikes;
  Tensor logits;
};

void check_oracle_scope(const Network& net, const Tensor& input, const BpttLimits& limits) {
  std::size_t neurons = 0;
  for (const Layer& layer : net.layers()) {
    if (layer.spec.kind != LayerKind::dense) throw ConfigError("BPTT oracle supports dense layers only");
    neurons += layer.neurons();
  }
  if (neurons > limits.max_neurons) {
    throw ConfigError("BPTT oracle refuses " + std::to_string(neurons) + " neurons (limit " +
                      std::to_string(limits.max_neurons) + ")");
  }
  if (input.rank() == 0 || input.dim(0) == 0 || input.dim(0) > limits.max_steps) {
    throw ConfigError("BPTT oracle needs 1.." + std::to_string(limits.max_steps) + " time steps");
  }
}

Unrolled unroll(const Network& net, const Tensor& input, SpikeFunction spike) {
  const auto& layers = net.layers();
  const std::size_t steps = input.dim(0);
  Unrolled run;
  run.inputs.assign(layers.size(), {});
  run.membranes.assign(layers.size(), {});
  run.spikes.assign(layers.size(), {});
  run.logits = Tensor({net.class_count()});

  for (std::size_t l = 0; l < layers.size(); ++l) {
    const Layer& layer = layers[l];
    Tensor u(layer.shapes.output);
    Tensor o(layer.shapes.output);
    for (std::size_t t = 0; t < steps; ++t) {
      Tensor x = l == 0 ? input.slice(t).reshaped(layer.shapes.input) : run.spikes[l - 1][t];
      const Tensor current = matvec(layer.weights, x);
      for (std::size_t i = 0; i < u.size(); ++i) {
        u[i] = layer.lif.gamma * (u[i] - layer.lif.v_th * o[i]) + current[i];
        o[i] = spike == SpikeFunction::heaviside ? (u[i] > layer.lif.v_th ? Real{1} : Real{0})
                                                 : smooth_spike(u[i], layer.lif);
      }
      run.inputs[l].push_back(std::move(x));
      run.membranes[l].push_back(u);
      run.spikes[l].push_back(o);
    }
  }
  for (const Tensor& o : run.spikes.back()) axpy_inplace(run.logits, 1, matvec(net.head().basis->matrix(), o));
  return run;
}

Real cross_entropy(const Tensor& logits, const Tensor& target) {
  const Tensor p = softmax(logits);
  Real loss = 0;
  for (std::size_t c = 0; c < p.size(); ++c) {
    if (target[c] != 0) loss -= target[c] * std::log(p[c]);
  }
  return loss;
}

}  // namespace

Real bptt_loss(const Network& net, const Tensor& input, const Tensor& target, SpikeFunction spike) {
  check_oracle_scope(net, input, BpttLimits{std::size_t(-1), std::size_t(-1)});
  if (target.size() != net.class_count()) throw ShapeError("bptt_loss: target length mismatch");
  return cross_entropy(unroll(net, input, spike).logits, target);
}

BpttResult bptt_oracle_gradients(const Network& net, const Tensor& input, const Tensor& target,
                                 SpikeFunction spike, const BpttLimits& limits) {
  check_oracle_scope(net, input, limits);
  if (target.size() != net.class_count()) throw ShapeError("bptt oracle: target length mismatch");
  const auto& layers = net.layers();
  const std::size_t steps = input.dim(0);
  const Unrolled run = unroll(net, input, spike);

  BpttResult result;
  result.loss = cross_entropy(run.logits, target);
  result.gradients.resize(layers.size());

  // dL/dz for z = sum_t B o_L[t]; the target need not be normalized.
  const Tensor p = softmax(run.logits);
  const Real mass = sum(target);
  Tensor grad_logits({p.size()});
  for (std::size_t c = 0; c < p.size(); ++c) grad_logits[c] = p[c] * mass - target[c];
  const Tensor readout_grad = matvec_transposed(net.head().basis->matrix(), grad_logits);

  std::vector<Tensor> delta_above;  // dL/du of layer l + 1, per step
  for (std::size_t l = layers.size(); l-- > 0;) {
    const Layer& layer = layers[l];
    const LifParams& lif = layer.lif;
    std::vector<Tensor> delta(steps);
    Tensor carry(layer.shapes.output);  // dL/du[t + 1]
    for (std::size_t t = steps; t-- > 0;) {
      const Tensor grad_spikes =
          l + 1 == layers.size() ? readout_grad : matvec_transposed(layers[l + 1].weights, delta_above[t]);
      const Tensor& u = run.membranes[l][t];
      Tensor d(layer.shapes.output);
      for (std::size_t i = 0; i < d.size(); ++i) {
        // o[t] also drives the reset term of u[t + 1] with weight -gamma * v_th.
        const Real grad_o = grad_spikes[i] - lif.gamma * lif.v_th * carry[i];
        d[i] = grad_o * psi(u[i], lif) + lif.gamma * carry[i];
      }
      carry = d;
      delta[t] = std::move(d);
    }
    Tensor grad(layer.shapes.weights);
    for (std::size_t t = 0; t < steps; ++t) accumulate_outer(grad, delta[t], run.inputs[l][t]);
    result.gradients[l] = std::move(grad);
    delta_above = std::move(delta);
  }
  return result;
}

}  // namespace tess
