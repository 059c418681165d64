#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tess/counters.hpp"
#include "tess/learning.hpp"

namespace tess {

enum class LayerKind { dense, conv, avgpool };

/// One entry of a layer stack. Input extents are inferred from the previous
/// layer, so a stack always composes once `infer_shapes` accepts it.
struct LayerSpec {
  LayerKind kind = LayerKind::dense;
  std::size_t out_features = 0;  // dense
  std::size_t out_channels = 0;  // conv
  std::size_t kernel = 3;
  std::size_t stride = 1;
  std::size_t padding = 1;
  std::size_t pool = 2;  // avgpool window; 0 pools the whole feature map
  std::optional<BasisKind> basis;
  std::optional<LifParams> lif;
  std::optional<TraceParams> trace;

  static LayerSpec dense(std::size_t out_features);
  static LayerSpec conv(std::size_t out_channels, std::size_t kernel = 3, std::size_t stride = 1,
                        std::size_t padding = 1);
  static LayerSpec avgpool(std::size_t window = 2);

  bool weighted() const noexcept { return kind != LayerKind::avgpool; }
};

std::string layer_kind_name(LayerKind kind);

struct NetworkOptions {
  std::size_t class_count = 2;
  Task task = Task::classification;
  LifParams lif;
  TraceParams trace;
  std::size_t learn_start = 0;  // learning signals are generated for t > learn_start
  BasisKind hidden_basis = BasisKind::square_wave;
  BasisKind head_basis = BasisKind::identity;
};

/// Per-layer extents resolved from a stack and an input frame shape.
struct LayerShapes {
  Shape input;
  Shape output;
  Shape weights;  // empty for avgpool
  std::optional<ConvGeometry> conv;
};

/// Validates a stack against an input frame shape and returns the resolved
/// extents of every layer. The last layer must be weighted with
/// class_count outputs.
std::vector<LayerShapes> infer_shapes(const std::vector<LayerSpec>& specs, const Shape& input_shape,
                                      std::size_t class_count);

struct Layer {
  LayerSpec spec;
  LayerShapes shapes;
  Tensor weights;
  std::optional<BasisMatrix> basis;
  LifParams lif;
  TraceParams trace;

  bool weighted() const noexcept { return spec.weighted(); }
  std::size_t neurons() const { return weighted() ? shape_size(shapes.output) : 0; }
  LayerContext context(Task task) const;
};

class Network {
 public:
  /// Builds the stack with fan-in scaled uniform weights in +-sqrt(1 / fan_in).
  static Network build(const std::vector<LayerSpec>& specs, const Shape& input_shape,
                       const NetworkOptions& options, std::uint64_t seed);

  const std::vector<Layer>& layers() const noexcept { return layers_; }
  const Layer& layer(std::size_t index) const { return layers_.at(index); }
  Tensor& weights(std::size_t index);
  const NetworkOptions& options() const noexcept { return options_; }
  const Shape& input_shape() const noexcept { return input_shape_; }
  std::size_t class_count() const noexcept { return options_.class_count; }
  const Layer& head() const { return layers_.back(); }
  std::size_t weighted_layer_count() const;

 private:
  std::vector<Layer> layers_;
  NetworkOptions options_;
  Shape input_shape_;
};

/// Per-sequence state of every layer. Avgpool entries stay empty. Zeroed at
/// sequence start, so nothing carries over between samples.
struct NetworkState {
  std::vector<LayerStepState> layers;

  static NetworkState zeros(const Network& net);
  void reset();
  /// Scalars held by pre/post traces across the network.
  std::size_t trace_scalars() const;
  /// Membrane potentials plus previous-spike buffers.
  std::size_t inference_scalars() const;
};

/// Advances every layer by one time step with learning enabled and returns the
/// head spikes. `t` counts from 1.
Tensor network_step(const Network& net, NetworkState& state, const Tensor& frame, const Tensor& target,
                    std::size_t t, OpCounters* counters = nullptr);

/// Runs a whole [T x frame] sequence through network_step. Weights are not
/// modified; per-layer accumulators hold the summed deltas afterwards.
void accumulate_sequence(const Network& net, NetworkState& state, const Tensor& input, const Tensor& target,
                         OpCounters* counters = nullptr);

struct ForwardResult {
  Tensor class_scores;  // sum over t of softmax(B_head o_L[t])
  std::size_t predicted = 0;
  std::vector<std::uint64_t> spike_counts;  // per layer (0 for avgpool)
  std::vector<Tensor> spike_record;         // per layer, [T x output] when requested
  std::size_t inference_scalars = 0;
};

/// Inference only: LIF dynamics through all layers, no traces or learning signals.
ForwardResult forward_sequence(const Network& net, const Tensor& input, bool record_spikes = false);

}  // namespace tess
