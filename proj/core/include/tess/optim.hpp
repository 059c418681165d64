#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>

#include "tess/tensor.hpp"

namespace tess {

struct AdamHyper {
  Real lr = 1e-3;
  Real beta1 = 0.9;
  Real beta2 = 0.999;
  Real eps = 1e-8;
};

/// First and second moment estimates for one parameter tensor.
struct AdamState {
  Tensor m;
  Tensor v;
  std::uint64_t step = 0;

  static AdamState zeros(const Shape& shape) { return {Tensor(shape), Tensor(shape), 0}; }
};

/// Advances the moments with `grad` and returns the bias-corrected delta
/// -lr * m_hat / (sqrt(v_hat) + eps) to be added to the parameters.
Tensor adam_step(AdamState& state, const Tensor& grad, const AdamHyper& hyper);

/// Halves the learning rate after `patience` consecutive epochs without a
/// strict improvement of the monitored metric (higher is better).
class PlateauScheduler {
 public:
  explicit PlateauScheduler(Real lr, std::size_t patience = 5, Real factor = 0.5)
      : lr_(lr), patience_(patience), factor_(factor) {}

  /// Call once per epoch; returns the learning rate for the next epoch.
  Real step(Real metric);

  Real lr() const noexcept { return lr_; }
  Real best() const noexcept { return best_; }
  std::size_t bad_epochs() const noexcept { return bad_epochs_; }

 private:
  Real lr_;
  std::size_t patience_;
  Real factor_;
  Real best_ = -std::numeric_limits<Real>::infinity();
  std::size_t bad_epochs_ = 0;
};

}  // namespace tess
