#include "tess/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "tess/errors.hpp"

namespace tess {

NetworkOptimizer::NetworkOptimizer(const Network& net) {
  for (const Layer& layer : net.layers()) {
    states_.push_back(layer.weighted() ? AdamState::zeros(layer.shapes.weights) : AdamState{});
  }
}

void NetworkOptimizer::apply(Network& net, const std::vector<Tensor>& grads, const AdamHyper& hyper,
                             UpdateDirection direction, OpCounters* counters) {
  ++steps_;
  for (std::size_t i = 0; i < net.layers().size(); ++i) {
    if (!net.layer(i).weighted()) continue;
    // Adam descends along its gradient argument; as_written flips the sign so
    // the literal "+ eta * sum" direction is taken.
    const Tensor& grad = grads.at(i);
    const Tensor delta =
        direction == UpdateDirection::descent ? adam_step(states_[i], grad, hyper) : adam_step(states_[i], scaled(grad, -1), hyper);
    Tensor& w = net.weights(i);
    axpy_inplace(w, 1, delta);
    if (!w.all_finite()) {
      throw NumericError("non-finite weight in layer " + std::to_string(i) + " after optimizer step " +
                         std::to_string(steps_));
    }
    if (counters != nullptr) ++counters->weight_updates;
  }
}

namespace {

std::vector<Tensor> collect_accumulators(const NetworkState& state) {
  std::vector<Tensor> grads;
  grads.reserve(state.layers.size());
  for (const LayerStepState& s : state.layers) grads.push_back(s.acc.delta_w);
  return grads;
}

std::size_t sequence_length(const Tensor& input) {
  if (input.rank() == 0) throw ShapeError("input sequence needs a leading time axis");
  return input.dim(0);
}

}  // namespace

SequenceReport train_sequence(Network& net, NetworkOptimizer& optimizer, const Tensor& input, const Tensor& target,
                              const TrainOptions& options) {
  SequenceReport report;
  const std::size_t steps = sequence_length(input);
  report.empty_window = net.options().learn_start >= steps;
  NetworkState state = NetworkState::zeros(net);

  std::vector<Tensor> applied(net.layers().size());
  if (options.mode == UpdateMode::per_sequence) {
    accumulate_sequence(net, state, input, target, &report.counters);
    applied = collect_accumulators(state);
    optimizer.apply(net, applied, options.adam, options.direction, &report.counters);
  } else {
    for (std::size_t t = 1; t <= steps; ++t) {
      network_step(net, state, input.slice(t - 1), target, t, &report.counters);
      std::vector<Tensor> grads = collect_accumulators(state);
      optimizer.apply(net, grads, options.adam, options.direction, &report.counters);
      for (std::size_t i = 0; i < grads.size(); ++i) {
        if (applied[i].empty()) applied[i] = Tensor(grads[i].shape());
        if (!grads[i].empty()) axpy_inplace(applied[i], 1, grads[i]);
      }
      for (LayerStepState& s : state.layers) s.acc.delta_w.fill(0);
    }
  }
  for (std::size_t i = 0; i < state.layers.size(); ++i) {
    report.update_norms.push_back(l2_norm(applied[i]));
    if (net.layer(i).weighted()) report.learning_steps = std::max(report.learning_steps, state.layers[i].acc.step_count);
  }
  return report;
}

namespace {

struct SampleResult {
  std::vector<Tensor> accumulators;
  OpCounters counters;
  std::size_t trace_scalars = 0;
};

SampleResult run_sample(const Network& net, const Sample& sample) {
  SampleResult r;
  NetworkState state = NetworkState::zeros(net);
  r.trace_scalars = state.trace_scalars();
  accumulate_sequence(net, state, sample.input, one_hot(sample.label, net.class_count()), &r.counters);
  r.accumulators = collect_accumulators(state);
  return r;
}

std::vector<Tensor> zero_grads(const Network& net) {
  std::vector<Tensor> grads;
  for (const Layer& layer : net.layers()) grads.emplace_back(layer.weighted() ? Tensor(layer.shapes.weights) : Tensor());
  return grads;
}

BatchReport train_batch_per_sequence(Network& net, NetworkOptimizer& optimizer, std::span<const Sample> batch,
                                     const TrainOptions& options) {
  std::vector<SampleResult> results(batch.size());
  const std::size_t workers = std::clamp<std::size_t>(options.threads, 1, std::max<std::size_t>(batch.size(), 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < batch.size(); ++i) results[i] = run_sample(net, batch[i]);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < batch.size(); i += workers) results[i] = run_sample(net, batch[i]);
      });
    }
  }

  BatchReport report;
  report.samples = batch.size();
  std::vector<Tensor> grads = zero_grads(net);
  for (const SampleResult& r : results) {  // fixed sample order
    for (std::size_t l = 0; l < grads.size(); ++l) {
      if (!grads[l].empty()) axpy_inplace(grads[l], 1, r.accumulators[l]);
    }
    report.counters += r.counters;
    report.trace_scalars = r.trace_scalars;
  }
  const Real inv = Real{1} / static_cast<Real>(batch.size());
  for (Tensor& g : grads) scale_inplace(g, inv);
  optimizer.apply(net, grads, options.adam, options.direction, &report.counters);
  return report;
}

BatchReport train_batch_per_step(Network& net, NetworkOptimizer& optimizer, std::span<const Sample> batch,
                                 const TrainOptions& options) {
  BatchReport report;
  report.samples = batch.size();
  const std::size_t steps = sequence_length(batch.front().input);
  std::vector<NetworkState> states;
  std::vector<Tensor> targets;
  for (const Sample& s : batch) {
    if (sequence_length(s.input) != steps) throw ShapeError("per-step batches need a uniform sequence length");
    states.push_back(NetworkState::zeros(net));
    targets.push_back(one_hot(s.label, net.class_count()));
  }
  report.trace_scalars = states.front().trace_scalars();
  const Real inv = Real{1} / static_cast<Real>(batch.size());
  for (std::size_t t = 1; t <= steps; ++t) {
    std::vector<Tensor> grads = zero_grads(net);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      network_step(net, states[i], batch[i].input.slice(t - 1), targets[i], t, &report.counters);
      for (std::size_t l = 0; l < grads.size(); ++l) {
        if (grads[l].empty()) continue;
        axpy_inplace(grads[l], inv, states[i].layers[l].acc.delta_w);
        states[i].layers[l].acc.delta_w.fill(0);
      }
    }
    optimizer.apply(net, grads, options.adam, options.direction, &report.counters);
  }
  return report;
}

}  // namespace

BatchReport train_batch(Network& net, NetworkOptimizer& optimizer, std::span<const Sample> batch,
                        const TrainOptions& options) {
  if (batch.empty()) return {};
  BatchReport report = options.mode == UpdateMode::per_sequence ? train_batch_per_sequence(net, optimizer, batch, options)
                                                                : train_batch_per_step(net, optimizer, batch, options);
  report.empty_window = net.options().learn_start >= sequence_length(batch.front().input);
  return report;
}

EvalResult evaluate(const Network& net, const SpikeDataset& dataset) {
  EvalResult r;
  r.count = dataset.samples.size();
  if (r.count == 0) return r;
  std::size_t hits = 0;
  for (const Sample& s : dataset.samples) {
    const ForwardResult f = forward_sequence(net, s.input);
    const Real steps = static_cast<Real>(s.input.dim(0));
    const Real p = std::max(f.class_scores[s.label] / steps, Real{1e-12});
    r.loss -= std::log(p);
    if (f.predicted == s.label) ++hits;
  }
  r.loss /= static_cast<Real>(r.count);
  r.accuracy = static_cast<Real>(hits) / static_cast<Real>(r.count);
  return r;
}

EpochReport train_epoch(Network& net, NetworkOptimizer& optimizer, const SpikeDataset& train, std::size_t batch_size,
                        std::mt19937_64& rng, const TrainOptions& options) {
  if (batch_size == 0) throw ConfigError("batch size must be positive");
  std::vector<std::size_t> order(train.samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);

  EpochReport report;
  std::vector<Sample> batch;
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    batch.clear();
    for (std::size_t i = start; i < std::min(order.size(), start + batch_size); ++i) batch.push_back(train.samples[order[i]]);
    const BatchReport b = train_batch(net, optimizer, batch, options);
    report.counters += b.counters;
    report.trace_scalars = b.trace_scalars;
    report.empty_window = report.empty_window || b.empty_window;
    ++report.batches;
  }
  return report;
}

}  // namespace tess
