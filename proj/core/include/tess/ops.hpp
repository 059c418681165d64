#pragma once

#include <cstddef>

#include "tess/tensor.hpp"

namespace tess {

/// y = W x for W of shape [m, n] and x of n values (any shape).
Tensor matvec(const Tensor& w, const Tensor& x);
/// y = W^T x for W of shape [m, n] and x of m values.
Tensor matvec_transposed(const Tensor& w, const Tensor& x);
/// [a.size(), b.size()] outer product.
Tensor outer(const Tensor& a, const Tensor& b);
/// acc[i, j] += a[i] * b[j] without materializing the product.
void accumulate_outer(Tensor& acc, const Tensor& a, const Tensor& b);

/// Square-kernel 2-D convolution geometry over a single [C, H, W] sample.
/// Only strides 1 and 2 with zero padding are supported.
struct ConvGeometry {
  std::size_t in_channels = 1;
  std::size_t out_channels = 1;
  std::size_t kernel = 3;
  std::size_t stride = 1;
  std::size_t padding = 0;
  std::size_t in_height = 1;
  std::size_t in_width = 1;

  void validate() const;
  std::size_t out_height() const { return (in_height + 2 * padding - kernel) / stride + 1; }
  std::size_t out_width() const { return (in_width + 2 * padding - kernel) / stride + 1; }
  Shape input_shape() const { return {in_channels, in_height, in_width}; }
  Shape output_shape() const { return {out_channels, out_height(), out_width()}; }
  Shape kernel_shape() const { return {out_channels, in_channels, kernel, kernel}; }
  std::size_t fan_in() const { return in_channels * kernel * kernel; }

  bool operator==(const ConvGeometry&) const = default;
};

/// Cross-correlation y[co, oy, ox] = sum W[co, ci, ky, kx] x[ci, oy*s + ky - p, ox*s + kx - p].
Tensor conv2d_forward(const Tensor& w, const Tensor& x, const ConvGeometry& geometry);

/// Kernel-shaped weight update realizing post (x) pre under weight sharing: every
/// kernel tap accumulates post_factor[co, oy, ox] times the pre_trace value it
/// touched at that output position.
Tensor conv2d_update_from_outer(const Tensor& post_factor, const Tensor& pre_trace,
                                const ConvGeometry& geometry);
void conv2d_accumulate_update(Tensor& acc, const Tensor& post_factor, const Tensor& pre_trace,
                              const ConvGeometry& geometry);

/// Non-overlapping average pooling over [C, H, W]; H and W must be divisible by `size`.
Tensor avgpool2d(const Tensor& x, std::size_t size);

}  // namespace tess
