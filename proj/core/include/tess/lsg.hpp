#pragma once

#include <cstddef>

#include "tess/counters.hpp"
#include "tess/tensor.hpp"

namespace tess {

enum class BasisKind { square_wave, identity };
enum class Task { classification, regression };

/// Fixed projection from a layer's n neurons onto the C-dimensional task space.
///
/// Square-wave rows: b[c][j] = +1 if floor(2 * j * (c + 1) / n) is even, else -1,
/// so row c oscillates c + 1 times across the neuron index. Rows are zero-mean
/// and quasi-orthogonal once n >= 4C. The identity kind (n == C) is used for the
/// output layer, which then trains on the plain softmax error.
class BasisMatrix {
 public:
  static BasisMatrix build(std::size_t class_count, std::size_t layer_width, BasisKind kind);

  const Tensor& matrix() const noexcept { return b_; }
  std::size_t class_count() const noexcept { return classes_; }
  std::size_t layer_width() const noexcept { return width_; }
  BasisKind kind() const noexcept { return kind_; }
  Real entry(std::size_t row, std::size_t col) const { return b_.at(row, col); }

 private:
  BasisMatrix(Tensor b, std::size_t classes, std::size_t width, BasisKind kind)
      : b_(std::move(b)), classes_(classes), width_(width), kind_(kind) {}

  Tensor b_;
  std::size_t classes_;
  std::size_t width_;
  BasisKind kind_;
};

struct LearningSignal {
  Tensor m;    // per-neuron modulatory signal, length n
  Tensor err;  // f(B o) - target, length C
};

/// Numerically stable softmax over a flat vector.
Tensor softmax(const Tensor& logits);

/// m = B^T (f(B o) - target), f = softmax for classification, identity for regression.
/// Costs exactly 2 * C * n multiply-accumulates, which are added to `counters`.
LearningSignal learning_signal(const BasisMatrix& basis, const Tensor& spikes, const Tensor& target,
                               Task task, OpCounters* counters = nullptr);

}  // namespace tess
