#include "tess/optim.hpp"

#include <cmath>

namespace tess {

Tensor adam_step(AdamState& state, const Tensor& grad, const AdamHyper& hyper) {
  require_same_shape(state.m, grad, "adam_step");
  ++state.step;
  const auto t = static_cast<Real>(state.step);
  const Real bias1 = Real{1} - std::pow(hyper.beta1, t);
  const Real bias2 = Real{1} - std::pow(hyper.beta2, t);
  Tensor delta(grad.shape());
  for (std::size_t i = 0; i < grad.size(); ++i) {
    const Real g = grad[i];
    state.m[i] = hyper.beta1 * state.m[i] + (1 - hyper.beta1) * g;
    state.v[i] = hyper.beta2 * state.v[i] + (1 - hyper.beta2) * g * g;
    const Real m_hat = state.m[i] / bias1;
    const Real v_hat = state.v[i] / bias2;
    delta[i] = -hyper.lr * m_hat / (std::sqrt(v_hat) + hyper.eps);
  }
  return delta;
}

Real PlateauScheduler::step(Real metric) {
  if (metric > best_) {
    best_ = metric;
    bad_epochs_ = 0;
    return lr_;
  }
  if (++bad_epochs_ >= patience_) {
    lr_ *= factor_;
    bad_epochs_ = 0;
  }
  return lr_;
}

}  // namespace tess
