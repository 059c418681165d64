#pragma once

#include <random>

#include "oracles.hpp"
#include "tess/network.hpp"
#include "tess/tensor.hpp"

namespace testing {

inline oracle::Vec to_vec(const tess::Tensor& t) { return {t.values().begin(), t.values().end()}; }

inline oracle::Mat to_mat(const tess::Tensor& t) {
  oracle::Mat m(t.dim(0), oracle::Vec(t.dim(1)));
  for (std::size_t i = 0; i < t.dim(0); ++i)
    for (std::size_t j = 0; j < t.dim(1); ++j) m[i][j] = t.at(i, j);
  return m;
}

inline tess::Tensor from_vec(const oracle::Vec& v) { return tess::Tensor({v.size()}, v); }

inline double max_abs_diff(const oracle::Mat& a, const oracle::Mat& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) d = std::max(d, std::fabs(a[i][j] - b[i][j]));
  return d;
}

inline tess::Tensor random_tensor(const tess::Shape& shape, std::mt19937_64& rng, double lo = -1, double hi = 1) {
  tess::Tensor t(shape);
  std::uniform_real_distribution<double> d(lo, hi);
  for (double& v : t.values()) v = d(rng);
  return t;
}

inline tess::Tensor random_binary(const tess::Shape& shape, std::mt19937_64& rng, double p = 0.5) {
  tess::Tensor t(shape);
  std::bernoulli_distribution d(p);
  for (double& v : t.values()) v = d(rng) ? 1.0 : 0.0;
  return t;
}

// Scales every weight so layers fire at a moderate rate under random binary input.
inline void scale_weights(tess::Network& net, double factor) {
  for (std::size_t i = 0; i < net.layers().size(); ++i)
    if (net.layer(i).weighted()) tess::scale_inplace(net.weights(i), factor);
}

}  // namespace testing
