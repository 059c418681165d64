#pragma once

// Reference implementations for the test suites. Plain nested vectors and
// loops, written from the defining equations, sharing no code with the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;

inline double psi(double u, double v_th = 0.6, double amplitude = 0.3) {
  const double d = 1.0 - std::fabs(u - v_th);
  return d > 0 ? amplitude * d : 0.0;
}

inline Mat zeros(std::size_t r, std::size_t c) { return Mat(r, Vec(c, 0.0)); }

inline Vec matvec(const Mat& w, const Vec& x) {
  Vec y(w.size(), 0.0);
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) y[i] += w[i][j] * x[j];
  return y;
}

inline Vec matvec_t(const Mat& w, const Vec& x) {
  Vec y(w.empty() ? 0 : w[0].size(), 0.0);
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) y[j] += w[i][j] * x[i];
  return y;
}

inline Mat outer(const Vec& a, const Vec& b) {
  Mat m = zeros(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) m[i][j] = a[i] * b[j];
  return m;
}

inline Vec softmax(const Vec& z) {
  double mx = z[0];
  for (double v : z) mx = std::max(mx, v);
  double s = 0;
  Vec p(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) s += (p[i] = std::exp(z[i] - mx));
  for (double& v : p) v /= s;
  return p;
}

inline Mat square_wave(std::size_t classes, std::size_t n) {
  Mat b = zeros(classes, n);
  for (std::size_t c = 0; c < classes; ++c)
    for (std::size_t j = 0; j < n; ++j) b[c][j] = ((2 * j * (c + 1) / n) % 2 == 0) ? 1.0 : -1.0;
  return b;
}

inline Mat identity(std::size_t n) {
  Mat b = zeros(n, n);
  for (std::size_t i = 0; i < n; ++i) b[i][i] = 1.0;
  return b;
}

// q[t] = sum_{t'=1..t} lambda^(t-t') x[t'], 1-based steps.
inline Vec direct_q(const std::vector<Vec>& x, std::size_t t, double lambda) {
  Vec q(x[0].size(), 0.0);
  for (std::size_t s = 1; s <= t; ++s)
    for (std::size_t j = 0; j < q.size(); ++j) q[j] += std::pow(lambda, double(t - s)) * x[s - 1][j];
  return q;
}

// h[t] = sum_{t'=0..t-1} lambda^(t-1-t') psi(u[t']); u[0] is the zero initial membrane.
inline Vec direct_h(const std::vector<Vec>& u_with_initial, std::size_t t, double lambda, double v_th = 0.6,
                    double amplitude = 0.3) {
  Vec h(u_with_initial[0].size(), 0.0);
  for (std::size_t s = 0; s + 1 <= t; ++s)
    for (std::size_t i = 0; i < h.size(); ++i)
      h[i] += std::pow(lambda, double(t - 1 - s)) * psi(u_with_initial[s][i], v_th, amplitude);
  return h;
}

// General three-factor eligibility: e[t] = beta e[t-1] + f[t] (x) g[t], fully materialized.
struct GeneralTrace {
  double beta;
  Mat e;
  void step(const Vec& f, const Vec& g) {
    if (e.empty()) e = zeros(f.size(), g.size());
    for (std::size_t i = 0; i < f.size(); ++i)
      for (std::size_t j = 0; j < g.size(); ++j) e[i][j] = beta * e[i][j] + f[i] * g[j];
  }
};

struct DenseParams {
  double gamma = 0.5, v_th = 0.6, amplitude = 0.3;
  double lambda_pre = 0.5, lambda_post = 0.2, alpha_pre = 1.0, alpha_post = 1.0;
  std::size_t learn_start = 0;
};

// Whole-sequence local-rule reference for a dense stack. Every step materializes
// both eligibility matrices and adds m_i * (e_pre + e_post)_ij, exactly as the
// rule is written, for steps t > learn_start.
inline std::vector<Mat> dense_rule_reference(const std::vector<Mat>& weights, const std::vector<Mat>& bases,
                                             const std::vector<Vec>& inputs, const Vec& target,
                                             const DenseParams& p) {
  const std::size_t layers = weights.size();
  std::vector<Vec> u(layers), o(layers), q(layers), h(layers);
  std::vector<Mat> acc(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    u[l] = o[l] = h[l] = Vec(weights[l].size(), 0.0);
    q[l] = Vec(weights[l][0].size(), 0.0);
    acc[l] = zeros(weights[l].size(), weights[l][0].size());
  }
  for (std::size_t t = 1; t <= inputs.size(); ++t) {
    Vec x = inputs[t - 1];
    for (std::size_t l = 0; l < layers; ++l) {
      for (std::size_t i = 0; i < h[l].size(); ++i) h[l][i] = p.lambda_post * h[l][i] + psi(u[l][i], p.v_th, p.amplitude);
      const Vec in = matvec(weights[l], x);
      for (std::size_t i = 0; i < u[l].size(); ++i) {
        u[l][i] = p.gamma * (u[l][i] - p.v_th * o[l][i]) + in[i];
        o[l][i] = u[l][i] > p.v_th ? 1.0 : 0.0;
      }
      for (std::size_t j = 0; j < q[l].size(); ++j) q[l][j] = p.lambda_pre * q[l][j] + x[j];
      if (t > p.learn_start) {
        const Vec err = [&] {
          Vec e = softmax(matvec(bases[l], o[l]));
          for (std::size_t c = 0; c < e.size(); ++c) e[c] -= target[c];
          return e;
        }();
        const Vec m = matvec_t(bases[l], err);
        Vec post_pre(u[l].size()), post_post(u[l].size());
        for (std::size_t i = 0; i < u[l].size(); ++i) {
          post_pre[i] = p.alpha_pre * psi(u[l][i], p.v_th, p.amplitude);
          post_post[i] = p.alpha_post * h[l][i];
        }
        const Mat e_pre = outer(post_pre, q[l]);
        const Mat e_post = outer(post_post, x);
        for (std::size_t i = 0; i < acc[l].size(); ++i)
          for (std::size_t j = 0; j < acc[l][i].size(); ++j) acc[l][i][j] += m[i] * (e_pre[i][j] + e_post[i][j]);
      }
      x = o[l];
    }
  }
  return acc;
}

// Direct-loop cross-correlation on [C][H][W] with zero padding.
using Cube = std::vector<Mat>;
using Kernel = std::vector<std::vector<Mat>>;  // [co][ci][ky][kx]

inline Cube conv_forward(const Kernel& w, const Cube& x, std::size_t stride, std::size_t pad) {
  const std::size_t co_n = w.size(), ci_n = x.size(), k = w[0][0].size();
  const long H = long(x[0].size()), W = long(x[0][0].size());
  const std::size_t oh = (H + 2 * pad - k) / stride + 1, ow = (W + 2 * pad - k) / stride + 1;
  Cube y(co_n, zeros(oh, ow));
  for (std::size_t co = 0; co < co_n; ++co)
    for (std::size_t oy = 0; oy < oh; ++oy)
      for (std::size_t ox = 0; ox < ow; ++ox)
        for (std::size_t ci = 0; ci < ci_n; ++ci)
          for (std::size_t ky = 0; ky < k; ++ky)
            for (std::size_t kx = 0; kx < k; ++kx) {
              const long iy = long(oy * stride + ky) - long(pad), ix = long(ox * stride + kx) - long(pad);
              if (iy < 0 || ix < 0 || iy >= H || ix >= W) continue;
              y[co][oy][ox] += w[co][ci][ky][kx] * x[ci][iy][ix];
            }
  return y;
}

// Sum over output positions of outer(post[:, oy, ox], receptive patch of pre).
inline Kernel conv_update(const Cube& post, const Cube& pre, std::size_t k, std::size_t stride, std::size_t pad) {
  const std::size_t co_n = post.size(), ci_n = pre.size();
  const long H = long(pre[0].size()), W = long(pre[0][0].size());
  Kernel dw(co_n, std::vector<Mat>(ci_n, zeros(k, k)));
  for (std::size_t oy = 0; oy < post[0].size(); ++oy)
    for (std::size_t ox = 0; ox < post[0][0].size(); ++ox) {
      Vec a(co_n), b(ci_n * k * k, 0.0);
      for (std::size_t co = 0; co < co_n; ++co) a[co] = post[co][oy][ox];
      for (std::size_t ci = 0; ci < ci_n; ++ci)
        for (std::size_t ky = 0; ky < k; ++ky)
          for (std::size_t kx = 0; kx < k; ++kx) {
            const long iy = long(oy * stride + ky) - long(pad), ix = long(ox * stride + kx) - long(pad);
            if (iy >= 0 && ix >= 0 && iy < H && ix < W) b[(ci * k + ky) * k + kx] = pre[ci][iy][ix];
          }
      const Mat o = outer(a, b);
      for (std::size_t co = 0; co < co_n; ++co)
        for (std::size_t ci = 0; ci < ci_n; ++ci)
          for (std::size_t ky = 0; ky < k; ++ky)
            for (std::size_t kx = 0; kx < k; ++kx) dw[co][ci][ky][kx] += o[co][(ci * k + ky) * k + kx];
    }
  return dw;
}

// Textbook Adam on a flat parameter vector.
struct Adam {
  double lr = 1e-3, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  Vec m, v;
  int t = 0;
  Vec delta(const Vec& g) {
    if (m.empty()) m = v = Vec(g.size(), 0.0);
    ++t;
    Vec d(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      m[i] = b1 * m[i] + (1 - b1) * g[i];
      v[i] = b2 * v[i] + (1 - b2) * g[i] * g[i];
      const double mh = m[i] / (1 - std::pow(b1, t));
      const double vh = v[i] / (1 - std::pow(b2, t));
      d[i] = -lr * mh / (std::sqrt(vh) + eps);
    }
    return d;
  }
};

// Multinomial logistic regression by full-batch gradient descent; returns training accuracy.
inline double linear_readout_accuracy(const std::vector<Vec>& x, const std::vector<std::size_t>& y,
                                      std::size_t classes, int iterations = 300, double lr = 0.5) {
  const std::size_t d = x[0].size();
  Mat w = zeros(classes, d + 1);
  for (int it = 0; it < iterations; ++it) {
    Mat g = zeros(classes, d + 1);
    for (std::size_t s = 0; s < x.size(); ++s) {
      Vec z(classes, 0.0);
      for (std::size_t c = 0; c < classes; ++c) {
        z[c] = w[c][d];
        for (std::size_t j = 0; j < d; ++j) z[c] += w[c][j] * x[s][j];
      }
      const Vec pr = softmax(z);
      for (std::size_t c = 0; c < classes; ++c) {
        const double e = pr[c] - (c == y[s] ? 1.0 : 0.0);
        for (std::size_t j = 0; j < d; ++j) g[c][j] += e * x[s][j];
        g[c][d] += e;
      }
    }
    for (std::size_t c = 0; c < classes; ++c)
      for (std::size_t j = 0; j <= d; ++j) w[c][j] -= lr * g[c][j] / double(x.size());
  }
  std::size_t hits = 0;
  for (std::size_t s = 0; s < x.size(); ++s) {
    std::size_t best = 0;
    double best_z = -1e300;
    for (std::size_t c = 0; c < classes; ++c) {
      double z = w[c][d];
      for (std::size_t j = 0; j < d; ++j) z += w[c][j] * x[s][j];
      if (z > best_z) best_z = z, best = c;
    }
    hits += best == y[s];
  }
  return double(hits) / double(x.size());
}

inline double cosine(const Vec& a, const Vec& b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) ab += a[i] * b[i], aa += a[i] * a[i], bb += b[i] * b[i];
  return ab / std::sqrt(aa * bb);
}

inline double norm(const Vec& a) {
  double s = 0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

}  // namespace oracle
