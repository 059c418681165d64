#include <benchmark/benchmark.h>

#include <random>

#include "tess/data.hpp"
#include "tess/learning.hpp"
#include "tess/lif.hpp"
#include "tess/lsg.hpp"
#include "tess/network.hpp"
#include "tess/ops.hpp"

using namespace tess;

namespace {

Tensor random_tensor(const Shape& shape, std::uint64_t seed, double lo = -1, double hi = 1) {
  Tensor t(shape);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(lo, hi);
  for (double& v : t.values()) v = d(rng);
  return t;
}

Tensor random_spikes(const Shape& shape, std::uint64_t seed) {
  Tensor t(shape);
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution d(0.2);
  for (double& v : t.values()) v = d(rng) ? 1.0 : 0.0;
  return t;
}

void BM_LifStep(benchmark::State& state) {
  const std::size_t n = std::size_t(state.range(0));
  const LifParams params;
  LifLayerState s = LifLayerState::zeros({n});
  const Tensor input = random_tensor({n}, 1, 0, 1.2);
  for (auto _ : state) {
    auto r = lif_step(std::move(s), input, params);
    s = std::move(r.state);
    benchmark::DoNotOptimize(r.spikes);
  }
  state.SetItemsProcessed(state.iterations() * std::int64_t(n));
}
BENCHMARK(BM_LifStep)->Arg(128)->Arg(4096)->Arg(65536);

void BM_LearningSignal(benchmark::State& state) {
  const std::size_t n = std::size_t(state.range(0)), classes = std::size_t(state.range(1));
  const BasisMatrix basis = BasisMatrix::build(classes, n, BasisKind::square_wave);
  const Tensor spikes = random_spikes({n}, 2);
  const Tensor target = one_hot(0, classes);
  for (auto _ : state) benchmark::DoNotOptimize(learning_signal(basis, spikes, target, Task::classification));
  state.counters["macs"] = benchmark::Counter(double(2 * classes * n), benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_LearningSignal)->Args({128, 10})->Args({4096, 10})->Args({4096, 100});

// One dense layer advancing through a full step of the local rule.
void BM_TessDenseLayerStep(benchmark::State& state) {
  const std::size_t n = std::size_t(state.range(0));
  NetworkOptions o;
  o.class_count = 10;
  const Network net = Network::build({LayerSpec::dense(n), LayerSpec::dense(10)}, {n}, o, 3);
  NetworkState s = NetworkState::zeros(net);
  const Tensor x = random_spikes({n}, 4);
  const Tensor y = one_hot(3, 10);
  const LayerContext ctx = net.layer(0).context(Task::classification);
  std::size_t t = 1;
  for (auto _ : state) benchmark::DoNotOptimize(tess_layer_step(ctx, s.layers[0], x, y, t++));
}
BENCHMARK(BM_TessDenseLayerStep)->Arg(64)->Arg(256)->Arg(1024);

void BM_Conv2dForward(benchmark::State& state) {
  const std::size_t c = std::size_t(state.range(0)), hw = std::size_t(state.range(1));
  const ConvGeometry g{c, c, 3, 1, 1, hw, hw};
  const Tensor w = random_tensor({c, c, 3, 3}, 5);
  const Tensor x = random_spikes(g.input_shape(), 6);
  for (auto _ : state) benchmark::DoNotOptimize(conv2d_forward(w, x, g));
  state.counters["macs"] =
      benchmark::Counter(double(c * c * 9 * hw * hw), benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_Conv2dForward)->Args({8, 16})->Args({32, 32});

void BM_Conv2dUpdate(benchmark::State& state) {
  const std::size_t c = std::size_t(state.range(0)), hw = std::size_t(state.range(1));
  const ConvGeometry g{c, c, 3, 1, 1, hw, hw};
  const Tensor post = random_tensor({c, hw, hw}, 7);
  const Tensor pre = random_tensor(g.input_shape(), 8, 0, 2);
  Tensor acc({c, c, 3, 3});
  for (auto _ : state) {
    conv2d_accumulate_update(acc, post, pre, g);
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_Conv2dUpdate)->Args({8, 16})->Args({32, 32});

}  // namespace
BENCHMARK_MAIN();
