#include "tess/lsg.hpp"

#include <algorithm>
#include <cmath>

#include "tess/errors.hpp"
#include "tess/ops.hpp"

namespace tess {

BasisMatrix BasisMatrix::build(std::size_t class_count, std::size_t layer_width, BasisKind kind) {
  if (kind == BasisKind::identity) {
    if (class_count != layer_width || class_count == 0) {
      throw ConfigError("identity basis requires layer width == class count (got n=" +
                        std::to_string(layer_width) + ", C=" + std::to_string(class_count) + ")");
    }
    Tensor b({class_count, class_count});
    for (std::size_t c = 0; c < class_count; ++c) b.at(c, c) = 1;
    return BasisMatrix(std::move(b), class_count, layer_width, kind);
  }

  if (class_count < 2) throw ConfigError("square-wave basis requires at least 2 classes");
  if (layer_width < class_count) {
    throw ConfigError("square-wave basis requires layer width >= class count (got n=" +
                      std::to_string(layer_width) + ", C=" + std::to_string(class_count) + ")");
  }
  Tensor b({class_count, layer_width});
  for (std::size_t c = 0; c < class_count; ++c) {
    for (std::size_t j = 0; j < layer_width; ++j) {
      const std::size_t phase = (2 * j * (c + 1)) / layer_width;
      b.at(c, j) = phase % 2 == 0 ? Real{1} : Real{-1};
    }
  }
  return BasisMatrix(std::move(b), class_count, layer_width, kind);
}

Tensor softmax(const Tensor& logits) {
  Tensor out(logits.shape());
  if (logits.empty()) return out;
  const Real peak = *std::max_element(logits.values().begin(), logits.values().end());
  Real total = 0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - peak);
    total += out[i];
  }
  scale_inplace(out, Real{1} / total);
  return out;
}

LearningSignal learning_signal(const BasisMatrix& basis, const Tensor& spikes, const Tensor& target,
                               Task task, OpCounters* counters) {
  const std::size_t c = basis.class_count();
  const std::size_t n = basis.layer_width();
  if (spikes.size() != n) {
    throw ShapeError("learning_signal: " + std::to_string(spikes.size()) + " spikes for basis width " +
                     std::to_string(n));
  }
  if (target.size() != c) {
    throw ShapeError("learning_signal: target length " + std::to_string(target.size()) + " != " +
                     std::to_string(c));
  }
  Tensor projected = matvec(basis.matrix(), spikes);
  Tensor prediction = task == Task::classification ? softmax(projected) : std::move(projected);
  Tensor err({c});
  for (std::size_t i = 0; i < c; ++i) err[i] = prediction[i] - target[i];
  Tensor m = matvec_transposed(basis.matrix(), err);
  if (counters != nullptr) counters->lsg_macs += 2 * static_cast<std::uint64_t>(c) * n;
  return {std::move(m), std::move(err)};
}

}  // namespace tess
