#include "tess/network.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "tess/errors.hpp"

namespace tess {

LayerSpec LayerSpec::dense(std::size_t out_features) {
  LayerSpec s;
  s.kind = LayerKind::dense;
  s.out_features = out_features;
  return s;
}

LayerSpec LayerSpec::conv(std::size_t out_channels, std::size_t kernel, std::size_t stride, std::size_t padding) {
  LayerSpec s;
  s.kind = LayerKind::conv;
  s.out_channels = out_channels;
  s.kernel = kernel;
  s.stride = stride;
  s.padding = padding;
  return s;
}

LayerSpec LayerSpec::avgpool(std::size_t window) {
  LayerSpec s;
  s.kind = LayerKind::avgpool;
  s.pool = window;
  return s;
}

std::string layer_kind_name(LayerKind kind) {
  switch (kind) {
    case LayerKind::dense: return "dense";
    case LayerKind::conv: return "conv";
    case LayerKind::avgpool: return "avgpool";
  }
  return "unknown";
}

std::vector<LayerShapes> infer_shapes(const std::vector<LayerSpec>& specs, const Shape& input_shape,
                                      std::size_t class_count) {
  if (specs.empty()) throw ConfigError("network needs at least one layer");
  if (shape_size(input_shape) == 0) throw ShapeError("network input shape is empty");
  std::vector<LayerShapes> out;
  out.reserve(specs.size());
  Shape current = input_shape;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const LayerSpec& spec = specs[i];
    const std::string where = "layer " + std::to_string(i) + " (" + layer_kind_name(spec.kind) + ")";
    LayerShapes shapes;
    switch (spec.kind) {
      case LayerKind::dense: {
        if (spec.out_features == 0) throw ConfigError(where + ": zero output width");
        const std::size_t n_in = shape_size(current);
        shapes.input = {n_in};
        shapes.output = {spec.out_features};
        shapes.weights = {spec.out_features, n_in};
        break;
      }
      case LayerKind::conv: {
        if (current.size() != 3) {
          throw ShapeError(where + ": expects a [C, H, W] input, got " + shape_string(current));
        }
        ConvGeometry g;
        g.in_channels = current[0];
        g.in_height = current[1];
        g.in_width = current[2];
        g.out_channels = spec.out_channels;
        g.kernel = spec.kernel;
        g.stride = spec.stride;
        g.padding = spec.padding;
        try {
          g.validate();
        } catch (const ConfigError& e) {
          throw ConfigError(where + ": " + e.what());
        }
        shapes.input = current;
        shapes.output = g.output_shape();
        shapes.weights = g.kernel_shape();
        shapes.conv = g;
        break;
      }
      case LayerKind::avgpool: {
        if (current.size() != 3) {
          throw ShapeError(where + ": expects a [C, H, W] input, got " + shape_string(current));
        }
        const std::size_t window = spec.pool == 0 ? current[1] : spec.pool;
        if (spec.pool == 0 && current[1] != current[2]) throw ShapeError(where + ": global pool needs square maps");
        if (current[1] % window != 0 || current[2] % window != 0) {
          throw ShapeError(where + ": window " + std::to_string(window) + " does not tile " + shape_string(current));
        }
        shapes.input = current;
        shapes.output = {current[0], current[1] / window, current[2] / window};
        break;
      }
    }
    current = shapes.output;
    out.push_back(std::move(shapes));
  }
  const LayerSpec& last = specs.back();
  if (last.kind != LayerKind::dense || last.out_features != class_count) {
    throw ConfigError("the last layer must be dense with " + std::to_string(class_count) + " outputs");
  }
  return out;
}

LayerContext Layer::context(Task task) const {
  return LayerContext{weights, shapes.conv, *basis, lif, trace, task};
}

Network Network::build(const std::vector<LayerSpec>& specs, const Shape& input_shape,
                       const NetworkOptions& options, std::uint64_t seed) {
  options.lif.validate();
  options.trace.validate();
  std::vector<LayerShapes> shapes = infer_shapes(specs, input_shape, options.class_count);

  Network net;
  net.options_ = options;
  net.input_shape_ = input_shape;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    Layer layer;
    layer.spec = specs[i];
    layer.shapes = std::move(shapes[i]);
    layer.lif = specs[i].lif.value_or(options.lif);
    layer.trace = specs[i].trace.value_or(options.trace);
    layer.lif.validate();
    layer.trace.validate();
    if (layer.weighted()) {
      const bool is_head = i + 1 == specs.size();
      const BasisKind kind = specs[i].basis.value_or(is_head ? options.head_basis : options.hidden_basis);
      layer.basis = BasisMatrix::build(options.class_count, shape_size(layer.shapes.output), kind);

      const std::size_t fan_in = layer.shapes.conv ? layer.shapes.conv->fan_in() : layer.shapes.weights[1];
      const Real bound = std::sqrt(Real{1} / static_cast<Real>(fan_in));
      std::uniform_real_distribution<Real> init(-bound, bound);
      layer.weights = Tensor(layer.shapes.weights);
      for (Real& w : layer.weights.values()) w = init(rng);
    }
    net.layers_.push_back(std::move(layer));
  }
  return net;
}

Tensor& Network::weights(std::size_t index) {
  Layer& layer = layers_.at(index);
  if (!layer.weighted()) throw ConfigError("layer " + std::to_string(index) + " carries no weights");
  return layer.weights;
}

std::size_t Network::weighted_layer_count() const {
  return static_cast<std::size_t>(std::count_if(layers_.begin(), layers_.end(), [](const Layer& l) { return l.weighted(); }));
}

NetworkState NetworkState::zeros(const Network& net) {
  NetworkState state;
  state.layers.reserve(net.layers().size());
  for (const Layer& layer : net.layers()) {
    LayerStepState s;
    if (layer.weighted()) {
      s.lif = LifLayerState::zeros(layer.shapes.output);
      s.trace = TraceState::zeros(layer.shapes.input, layer.shapes.output, layer.trace);
      s.acc = LayerUpdateAccumulator::zeros(layer.shapes.weights, net.options().learn_start);
    }
    state.layers.push_back(std::move(s));
  }
  return state;
}

void NetworkState::reset() {
  for (LayerStepState& s : layers) {
    s.lif.u.fill(0);
    s.lif.o_prev.fill(0);
    s.trace.q.fill(0);
    s.trace.h.fill(0);
    s.acc.reset();
  }
}

std::size_t NetworkState::trace_scalars() const {
  std::size_t total = 0;
  for (const LayerStepState& s : layers) total += s.trace.scalar_count();
  return total;
}

std::size_t NetworkState::inference_scalars() const {
  std::size_t total = 0;
  for (const LayerStepState& s : layers) total += s.lif.u.size() + s.lif.o_prev.size();
  return total;
}

namespace {

// Brings the incoming activity to the layout a layer consumes.
Tensor layer_input(const Layer& layer, Tensor activity) {
  if (activity.shape() == layer.shapes.input) return activity;
  if (activity.size() != shape_size(layer.shapes.input)) {
    throw ShapeError("layer input " + shape_string(activity.shape()) + " does not fit " +
                     shape_string(layer.shapes.input));
  }
  return std::move(activity).reshaped(layer.shapes.input);
}

Tensor pool_layer(const Layer& layer, const Tensor& input) {
  const std::size_t window = layer.spec.pool == 0 ? layer.shapes.input[1] : layer.spec.pool;
  return avgpool2d(input, window);
}

}  // namespace

Tensor network_step(const Network& net, NetworkState& state, const Tensor& frame, const Tensor& target,
                    std::size_t t, OpCounters* counters) {
  if (state.layers.size() != net.layers().size()) throw ShapeError("network state does not match network");
  Tensor activity = frame;
  for (std::size_t i = 0; i < net.layers().size(); ++i) {
    const Layer& layer = net.layers()[i];
    Tensor input = layer_input(layer, std::move(activity));
    if (!layer.weighted()) {
      activity = pool_layer(layer, input);
      continue;
    }
    activity = tess_layer_step(layer.context(net.options().task), state.layers[i], input, target, t, counters);
  }
  return activity;
}

void accumulate_sequence(const Network& net, NetworkState& state, const Tensor& input, const Tensor& target,
                         OpCounters* counters) {
  if (input.rank() == 0) throw ShapeError("input sequence needs a leading time axis");
  const std::size_t steps = input.dim(0);
  for (std::size_t t = 1; t <= steps; ++t) network_step(net, state, input.slice(t - 1), target, t, counters);
}

ForwardResult forward_sequence(const Network& net, const Tensor& input, bool record_spikes) {
  if (input.rank() == 0 || input.dim(0) == 0) throw ShapeError("forward_sequence needs at least one time step");
  const std::size_t steps = input.dim(0);
  const auto& layers = net.layers();

  std::vector<LifLayerState> lif(layers.size());
  std::size_t inference_scalars = 0;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (!layers[i].weighted()) continue;
    lif[i] = LifLayerState::zeros(layers[i].shapes.output);
    inference_scalars += 2 * lif[i].u.size();
  }

  ForwardResult result;
  result.class_scores = Tensor({net.class_count()});
  result.spike_counts.assign(layers.size(), 0);
  result.inference_scalars = inference_scalars;
  if (record_spikes) {
    for (const Layer& layer : layers) {
      Shape shape = layer.shapes.output;
      shape.insert(shape.begin(), steps);
      result.spike_record.emplace_back(shape);
    }
  }

  for (std::size_t t = 0; t < steps; ++t) {
    Tensor activity = input.slice(t);
    for (std::size_t i = 0; i < layers.size(); ++i) {
      const Layer& layer = layers[i];
      Tensor x = layer_input(layer, std::move(activity));
      if (layer.weighted()) {
        auto stepped = lif_step(std::move(lif[i]), synaptic_input(layer.weights, layer.shapes.conv, x), layer.lif);
        lif[i] = std::move(stepped.state);
        activity = std::move(stepped.spikes);
        result.spike_counts[i] += static_cast<std::uint64_t>(sum(activity));
      } else {
        activity = pool_layer(layer, x);
      }
      if (record_spikes) {
        std::copy(activity.values().begin(), activity.values().end(),
                  result.spike_record[i].values().begin() + static_cast<std::ptrdiff_t>(t * activity.size()));
      }
    }
    const Tensor scores = softmax(matvec(net.head().basis->matrix(), activity));
    axpy_inplace(result.class_scores, 1, scores);
  }
  const auto& scores = result.class_scores.values();
  result.predicted = static_cast<std::size_t>(std::max_element(scores.begin(), scores.end()) - scores.begin());
  return result;
}

}  // namespace tess
