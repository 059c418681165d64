#include "tess/ops.hpp"

#include "tess/errors.hpp"

namespace tess {

namespace {

void require_matrix(const Tensor& w, const char* context) {
  if (w.rank() != 2) throw ShapeError(std::string(context) + ": expected a rank-2 weight matrix");
}

void require_conv_operands(const Tensor& x, const Shape& expected, const char* context) {
  if (x.shape() != expected) {
    throw ShapeError(std::string(context) + ": expected " + shape_string(expected) + ", got " +
                     shape_string(x.shape()));
  }
}

}  // namespace

Tensor matvec(const Tensor& w, const Tensor& x) {
  require_matrix(w, "matvec");
  const std::size_t rows = w.dim(0);
  const std::size_t cols = w.dim(1);
  if (x.size() != cols) throw ShapeError("matvec: weight columns do not match input size");
  Tensor y({rows});
  const Real* wp = w.data();
  const Real* xp = x.data();
  for (std::size_t i = 0; i < rows; ++i) {
    Real acc = 0;
    const Real* row = wp + i * cols;
    for (std::size_t j = 0; j < cols; ++j) acc += row[j] * xp[j];
    y[i] = acc;
  }
  return y;
}

Tensor matvec_transposed(const Tensor& w, const Tensor& x) {
  require_matrix(w, "matvec_transposed");
  const std::size_t rows = w.dim(0);
  const std::size_t cols = w.dim(1);
  if (x.size() != rows) throw ShapeError("matvec_transposed: weight rows do not match input size");
  Tensor y({cols});
  for (std::size_t i = 0; i < rows; ++i) {
    const Real xi = x[i];
    const Real* row = w.data() + i * cols;
    for (std::size_t j = 0; j < cols; ++j) y[j] += row[j] * xi;
  }
  return y;
}

Tensor outer(const Tensor& a, const Tensor& b) {
  Tensor out({a.size(), b.size()});
  accumulate_outer(out, a, b);
  return out;
}

void accumulate_outer(Tensor& acc, const Tensor& a, const Tensor& b) {
  if (acc.size() != a.size() * b.size()) throw ShapeError("accumulate_outer: accumulator size mismatch");
  const std::size_t cols = b.size();
  Real* out = acc.data();
  const Real* bp = b.data();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Real ai = a[i];
    if (ai == 0) continue;
    Real* row = out + i * cols;
    for (std::size_t j = 0; j < cols; ++j) row[j] += ai * bp[j];
  }
}

void ConvGeometry::validate() const {
  if (in_channels == 0 || out_channels == 0 || kernel == 0) throw ConfigError("conv: zero extent");
  if (stride != 1 && stride != 2) throw ConfigError("conv: only stride 1 and 2 are supported");
  if (in_height + 2 * padding < kernel || in_width + 2 * padding < kernel) {
    throw ConfigError("conv: kernel larger than padded input");
  }
}

Tensor conv2d_forward(const Tensor& w, const Tensor& x, const ConvGeometry& g) {
  require_conv_operands(w, g.kernel_shape(), "conv2d_forward kernel");
  require_conv_operands(x, g.input_shape(), "conv2d_forward input");
  const std::size_t oh = g.out_height();
  const std::size_t ow = g.out_width();
  const auto ih = static_cast<std::ptrdiff_t>(g.in_height);
  const auto iw = static_cast<std::ptrdiff_t>(g.in_width);
  const auto pad = static_cast<std::ptrdiff_t>(g.padding);
  const auto k = g.kernel;
  Tensor y(g.output_shape());
  for (std::size_t co = 0; co < g.out_channels; ++co) {
    for (std::size_t ci = 0; ci < g.in_channels; ++ci) {
      const Real* plane = x.data() + ci * g.in_height * g.in_width;
      const Real* kern = w.data() + (co * g.in_channels + ci) * k * k;
      for (std::size_t ky = 0; ky < k; ++ky) {
        for (std::size_t kx = 0; kx < k; ++kx) {
          const Real wv = kern[ky * k + kx];
          if (wv == 0) continue;
          for (std::size_t oy = 0; oy < oh; ++oy) {
            const auto iy = static_cast<std::ptrdiff_t>(oy * g.stride + ky) - pad;
            if (iy < 0 || iy >= ih) continue;
            Real* out_row = y.data() + (co * oh + oy) * ow;
            const Real* in_row = plane + iy * iw;
            for (std::size_t ox = 0; ox < ow; ++ox) {
              const auto ix = static_cast<std::ptrdiff_t>(ox * g.stride + kx) - pad;
              if (ix < 0 || ix >= iw) continue;
              out_row[ox] += wv * in_row[ix];
            }
          }
        }
      }
    }
  }
  return y;
}

void conv2d_accumulate_update(Tensor& acc, const Tensor& post, const Tensor& pre, const ConvGeometry& g) {
  require_conv_operands(acc, g.kernel_shape(), "conv2d_update accumulator");
  require_conv_operands(post, g.output_shape(), "conv2d_update post factor");
  require_conv_operands(pre, g.input_shape(), "conv2d_update pre trace");
  const std::size_t oh = g.out_height();
  const std::size_t ow = g.out_width();
  const auto ih = static_cast<std::ptrdiff_t>(g.in_height);
  const auto iw = static_cast<std::ptrdiff_t>(g.in_width);
  const auto pad = static_cast<std::ptrdiff_t>(g.padding);
  const auto k = g.kernel;
  for (std::size_t co = 0; co < g.out_channels; ++co) {
    const Real* post_plane = post.data() + co * oh * ow;
    for (std::size_t ci = 0; ci < g.in_channels; ++ci) {
      const Real* plane = pre.data() + ci * g.in_height * g.in_width;
      Real* kern = acc.data() + (co * g.in_channels + ci) * k * k;
      for (std::size_t ky = 0; ky < k; ++ky) {
        for (std::size_t kx = 0; kx < k; ++kx) {
          Real total = 0;
          for (std::size_t oy = 0; oy < oh; ++oy) {
            const auto iy = static_cast<std::ptrdiff_t>(oy * g.stride + ky) - pad;
            if (iy < 0 || iy >= ih) continue;
            const Real* post_row = post_plane + oy * ow;
            const Real* in_row = plane + iy * iw;
            for (std::size_t ox = 0; ox < ow; ++ox) {
              const auto ix = static_cast<std::ptrdiff_t>(ox * g.stride + kx) - pad;
              if (ix < 0 || ix >= iw) continue;
              total += post_row[ox] * in_row[ix];
            }
          }
          kern[ky * k + kx] += total;
        }
      }
    }
  }
}

Tensor conv2d_update_from_outer(const Tensor& post, const Tensor& pre, const ConvGeometry& g) {
  Tensor acc(g.kernel_shape());
  conv2d_accumulate_update(acc, post, pre, g);
  return acc;
}

Tensor avgpool2d(const Tensor& x, std::size_t size) {
  if (x.rank() != 3) throw ShapeError("avgpool2d: expected [C, H, W] input");
  const std::size_t c = x.dim(0), h = x.dim(1), w = x.dim(2);
  if (size == 0 || h % size != 0 || w % size != 0) {
    throw ShapeError("avgpool2d: window " + std::to_string(size) + " does not tile " + shape_string(x.shape()));
  }
  const std::size_t oh = h / size, ow = w / size;
  const Real norm = Real{1} / static_cast<Real>(size * size);
  Tensor y({c, oh, ow});
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t yy = 0; yy < h; ++yy) {
      for (std::size_t xx = 0; xx < w; ++xx) {
        y[(ch * oh + yy / size) * ow + xx / size] += x[(ch * h + yy) * w + xx] * norm;
      }
    }
  }
  return y;
}

}  // namespace tess
