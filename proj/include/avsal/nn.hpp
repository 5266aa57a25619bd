#pragma once

// Small dense tensor type and the handful of layers the saliency model
// needs, each with explicit forward/backward. Everything runs on the CPU in
// plain loops; the model is deliberately toy-scale.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "avsal/types.hpp"

namespace avsal::nn {

template <typename T>
struct Tensor {
  std::vector<int> shape;
  std::vector<T> data;

  Tensor() = default;
  explicit Tensor(std::vector<int> s) : shape(std::move(s)) {
    data.assign(static_cast<size_t>(numel_of(shape)), T(0));
  }

  static int64_t numel_of(const std::vector<int>& s) {
    int64_t n = 1;
    for (int d : s) n *= d;
    return n;
  }
  int64_t numel() const { return static_cast<int64_t>(data.size()); }
  int dim(int i) const { return shape[static_cast<size_t>(i)]; }
};

// A named view into one parameter (or buffer) tensor and its gradient.
template <typename T>
struct ParamRef {
  std::string name;
  std::vector<T>* value = nullptr;
  std::vector<T>* grad = nullptr;  // null for buffers
  bool buffer = false;             // running statistics: saved, never optimized
};

// ---------------------------------------------------------------------------
// 3D convolution, kernel 3x3x3, padding 1, stride (sd, s, s). No bias: every
// use here is followed by batch norm, which cancels a constant shift.
template <typename T>
struct Conv3d {
  int in_c = 0, out_c = 0, stride_d = 1, stride_s = 2;
  std::vector<T> w, gw;  // [out_c][in_c][3][3][3]

  Tensor<T> input;  // cached for backward

  Conv3d() = default;
  Conv3d(int in, int out, int sd, int ss) : in_c(in), out_c(out), stride_d(sd), stride_s(ss) {
    w.assign(static_cast<size_t>(out) * in * 27, T(0));
    gw.assign(w.size(), T(0));
  }

  static int out_dim(int in, int stride) { return (in + 2 - 3) / stride + 1; }

  Tensor<T> forward(const Tensor<T>& x) {
    input = x;
    int n = x.dim(0), d = x.dim(2), h = x.dim(3), wd = x.dim(4);
    int od = out_dim(d, stride_d), oh = out_dim(h, stride_s), ow = out_dim(wd, stride_s);
    Tensor<T> y({n, out_c, od, oh, ow});
    const int64_t x_c = static_cast<int64_t>(d) * h * wd;
    const int64_t x_hw = static_cast<int64_t>(h) * wd;
    for (int b = 0; b < n; ++b) {
      for (int oc = 0; oc < out_c; ++oc) {
        int64_t yo = ((static_cast<int64_t>(b) * out_c + oc) * od) * oh * ow;
        for (int zd = 0; zd < od; ++zd) {
          for (int zy = 0; zy < oh; ++zy) {
            for (int zx = 0; zx < ow; ++zx) {
              T acc = 0;
              for (int ic = 0; ic < in_c; ++ic) {
                const T* xp = &x.data[(static_cast<int64_t>(b) * in_c + ic) * x_c];
                const T* wp = &w[(static_cast<size_t>(oc) * in_c + ic) * 27];
                for (int kd = 0; kd < 3; ++kd) {
                  int id = zd * stride_d + kd - 1;
                  if (id < 0 || id >= d) continue;
                  for (int ky = 0; ky < 3; ++ky) {
                    int iy = zy * stride_s + ky - 1;
                    if (iy < 0 || iy >= h) continue;
                    for (int kx = 0; kx < 3; ++kx) {
                      int ix = zx * stride_s + kx - 1;
                      if (ix < 0 || ix >= wd) continue;
                      acc += xp[id * x_hw + static_cast<int64_t>(iy) * wd + ix] *
                             wp[(kd * 3 + ky) * 3 + kx];
                    }
                  }
                }
              }
              y.data[static_cast<size_t>(yo + (static_cast<int64_t>(zd) * oh + zy) * ow + zx)] = acc;
            }
          }
        }
      }
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& gy) {
    const Tensor<T>& x = input;
    int n = x.dim(0), d = x.dim(2), h = x.dim(3), wd = x.dim(4);
    int od = gy.dim(2), oh = gy.dim(3), ow = gy.dim(4);
    Tensor<T> gx(x.shape);
    const int64_t x_c = static_cast<int64_t>(d) * h * wd;
    const int64_t x_hw = static_cast<int64_t>(h) * wd;
    for (int b = 0; b < n; ++b) {
      for (int oc = 0; oc < out_c; ++oc) {
        int64_t yo = ((static_cast<int64_t>(b) * out_c + oc) * od) * oh * ow;
        for (int zd = 0; zd < od; ++zd) {
          for (int zy = 0; zy < oh; ++zy) {
            for (int zx = 0; zx < ow; ++zx) {
              T g = gy.data[static_cast<size_t>(yo + (static_cast<int64_t>(zd) * oh + zy) * ow + zx)];
              if (g == T(0)) continue;
              for (int ic = 0; ic < in_c; ++ic) {
                const T* xp = &x.data[(static_cast<int64_t>(b) * in_c + ic) * x_c];
                T* gxp = &gx.data[(static_cast<int64_t>(b) * in_c + ic) * x_c];
                const T* wp = &w[(static_cast<size_t>(oc) * in_c + ic) * 27];
                T* gwp = &gw[(static_cast<size_t>(oc) * in_c + ic) * 27];
                for (int kd = 0; kd < 3; ++kd) {
                  int id = zd * stride_d + kd - 1;
                  if (id < 0 || id >= d) continue;
                  for (int ky = 0; ky < 3; ++ky) {
                    int iy = zy * stride_s + ky - 1;
                    if (iy < 0 || iy >= h) continue;
                    for (int kx = 0; kx < 3; ++kx) {
                      int ix = zx * stride_s + kx - 1;
                      if (ix < 0 || ix >= wd) continue;
                      int64_t xi = id * x_hw + static_cast<int64_t>(iy) * wd + ix;
                      gwp[(kd * 3 + ky) * 3 + kx] += g * xp[xi];
                      gxp[xi] += g * wp[(kd * 3 + ky) * 3 + kx];
                    }
                  }
                }
              }
            }
          }
        }
      }
    }
    return gx;
  }
};

// ---------------------------------------------------------------------------
// 2D convolution, stride 1, square kernel with same-padding (k odd).
template <typename T>
struct Conv2d {
  int in_c = 0, out_c = 0, k = 1;
  bool has_bias = false;
  std::vector<T> w, gw;  // [out_c][in_c][k][k]
  std::vector<T> b, gb;

  Tensor<T> input;

  Conv2d() = default;
  Conv2d(int in, int out, int kernel, bool bias)
      : in_c(in), out_c(out), k(kernel), has_bias(bias) {
    w.assign(static_cast<size_t>(out) * in * k * k, T(0));
    gw.assign(w.size(), T(0));
    if (bias) {
      b.assign(static_cast<size_t>(out), T(0));
      gb.assign(b.size(), T(0));
    }
  }

  Tensor<T> forward(const Tensor<T>& x) {
    input = x;
    int n = x.dim(0), h = x.dim(2), wd = x.dim(3);
    int pad = k / 2;
    Tensor<T> y({n, out_c, h, wd});
    for (int bi = 0; bi < n; ++bi) {
      for (int oc = 0; oc < out_c; ++oc) {
        T bias = has_bias ? b[static_cast<size_t>(oc)] : T(0);
        for (int zy = 0; zy < h; ++zy) {
          for (int zx = 0; zx < wd; ++zx) {
            T acc = bias;
            for (int ic = 0; ic < in_c; ++ic) {
              const T* xp = &x.data[(static_cast<int64_t>(bi) * in_c + ic) * h * wd];
              const T* wp = &w[(static_cast<size_t>(oc) * in_c + ic) * k * k];
              for (int ky = 0; ky < k; ++ky) {
                int iy = zy + ky - pad;
                if (iy < 0 || iy >= h) continue;
                for (int kx = 0; kx < k; ++kx) {
                  int ix = zx + kx - pad;
                  if (ix < 0 || ix >= wd) continue;
                  acc += xp[static_cast<int64_t>(iy) * wd + ix] * wp[ky * k + kx];
                }
              }
            }
            y.data[static_cast<size_t>(
                ((static_cast<int64_t>(bi) * out_c + oc) * h + zy) * wd + zx)] = acc;
          }
        }
      }
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& gy) {
    const Tensor<T>& x = input;
    int n = x.dim(0), h = x.dim(2), wd = x.dim(3);
    int pad = k / 2;
    Tensor<T> gx(x.shape);
    for (int bi = 0; bi < n; ++bi) {
      for (int oc = 0; oc < out_c; ++oc) {
        for (int zy = 0; zy < h; ++zy) {
          for (int zx = 0; zx < wd; ++zx) {
            T g = gy.data[static_cast<size_t>(
                ((static_cast<int64_t>(bi) * out_c + oc) * h + zy) * wd + zx)];
            if (g == T(0)) continue;
            if (has_bias) gb[static_cast<size_t>(oc)] += g;
            for (int ic = 0; ic < in_c; ++ic) {
              const T* xp = &x.data[(static_cast<int64_t>(bi) * in_c + ic) * h * wd];
              T* gxp = &gx.data[(static_cast<int64_t>(bi) * in_c + ic) * h * wd];
              const T* wp = &w[(static_cast<size_t>(oc) * in_c + ic) * k * k];
              T* gwp = &gw[(static_cast<size_t>(oc) * in_c + ic) * k * k];
              for (int ky = 0; ky < k; ++ky) {
                int iy = zy + ky - pad;
                if (iy < 0 || iy >= h) continue;
                for (int kx = 0; kx < k; ++kx) {
                  int ix = zx + kx - pad;
                  if (ix < 0 || ix >= wd) continue;
                  gwp[ky * k + kx] += g * xp[static_cast<int64_t>(iy) * wd + ix];
                  gxp[static_cast<int64_t>(iy) * wd + ix] += g * wp[ky * k + kx];
                }
              }
            }
          }
        }
      }
    }
    return gx;
  }
};

// ---------------------------------------------------------------------------
// Batch normalization over the channel axis of an (N, C, ...) tensor.
// Training uses biased batch statistics; evaluation uses the running ones.
template <typename T>
struct BatchNorm {
  int channels = 0;
  T momentum = T(0.1);
  T eps = T(1e-5);
  std::vector<T> gamma, beta, g_gamma, g_beta;
  std::vector<T> running_mean, running_var;

  // backward cache
  Tensor<T> xhat;
  std::vector<T> inv_std, mean;
  int64_t per_channel = 0;

  BatchNorm() = default;
  explicit BatchNorm(int c) : channels(c) {
    gamma.assign(static_cast<size_t>(c), T(1));
    beta.assign(static_cast<size_t>(c), T(0));
    g_gamma.assign(static_cast<size_t>(c), T(0));
    g_beta.assign(static_cast<size_t>(c), T(0));
    running_mean.assign(static_cast<size_t>(c), T(0));
    running_var.assign(static_cast<size_t>(c), T(1));
  }

  // use_batch_stats: normalize by this batch's moments (training behavior);
  // update_running: fold them into the running estimates. Kept separate so
  // finite-difference probes can re-run forward without mutating state.
  Tensor<T> forward(const Tensor<T>& x, bool use_batch_stats, bool update_running) {
    int n = x.dim(0);
    int64_t spatial = x.numel() / (static_cast<int64_t>(n) * channels);
    per_channel = static_cast<int64_t>(n) * spatial;
    Tensor<T> y(x.shape);
    xhat = Tensor<T>(x.shape);
    inv_std.assign(static_cast<size_t>(channels), T(0));
    mean.assign(static_cast<size_t>(channels), T(0));

    for (int c = 0; c < channels; ++c) {
      T mu, var;
      if (use_batch_stats) {
        T sum = 0;
        for (int b = 0; b < n; ++b) {
          const T* xp = &x.data[(static_cast<int64_t>(b) * channels + c) * spatial];
          for (int64_t i = 0; i < spatial; ++i) sum += xp[i];
        }
        mu = sum / static_cast<T>(per_channel);
        T sq = 0;
        for (int b = 0; b < n; ++b) {
          const T* xp = &x.data[(static_cast<int64_t>(b) * channels + c) * spatial];
          for (int64_t i = 0; i < spatial; ++i) sq += (xp[i] - mu) * (xp[i] - mu);
        }
        var = sq / static_cast<T>(per_channel);
        if (update_running) {
          running_mean[static_cast<size_t>(c)] =
              (T(1) - momentum) * running_mean[static_cast<size_t>(c)] + momentum * mu;
          running_var[static_cast<size_t>(c)] =
              (T(1) - momentum) * running_var[static_cast<size_t>(c)] + momentum * var;
        }
      } else {
        mu = running_mean[static_cast<size_t>(c)];
        var = running_var[static_cast<size_t>(c)];
      }
      T istd = T(1) / std::sqrt(var + eps);
      mean[static_cast<size_t>(c)] = mu;
      inv_std[static_cast<size_t>(c)] = istd;
      T g = gamma[static_cast<size_t>(c)], bt = beta[static_cast<size_t>(c)];
      for (int b = 0; b < n; ++b) {
        const T* xp = &x.data[(static_cast<int64_t>(b) * channels + c) * spatial];
        T* hp = &xhat.data[(static_cast<int64_t>(b) * channels + c) * spatial];
        T* yp = &y.data[(static_cast<int64_t>(b) * channels + c) * spatial];
        for (int64_t i = 0; i < spatial; ++i) {
          hp[i] = (xp[i] - mu) * istd;
          yp[i] = g * hp[i] + bt;
        }
      }
    }
    return y;
  }

  // Backward through the batch-statistics normalization.
  Tensor<T> backward(const Tensor<T>& gy) {
    int n = gy.dim(0);
    int64_t spatial = gy.numel() / (static_cast<int64_t>(n) * channels);
    Tensor<T> gx(gy.shape);
    T m = static_cast<T>(per_channel);
    for (int c = 0; c < channels; ++c) {
      T sum_gy = 0, sum_gy_xhat = 0;
      for (int b = 0; b < n; ++b) {
        const T* gp = &gy.data[(static_cast<int64_t>(b) * channels + c) * spatial];
        const T* hp = &xhat.data[(static_cast<int64_t>(b) * channels + c) * spatial];
        for (int64_t i = 0; i < spatial; ++i) {
          sum_gy += gp[i];
          sum_gy_xhat += gp[i] * hp[i];
        }
      }
      g_gamma[static_cast<size_t>(c)] += sum_gy_xhat;
      g_beta[static_cast<size_t>(c)] += sum_gy;
      T g = gamma[static_cast<size_t>(c)];
      T istd = inv_std[static_cast<size_t>(c)];
      for (int b = 0; b < n; ++b) {
        const T* gp = &gy.data[(static_cast<int64_t>(b) * channels + c) * spatial];
        const T* hp = &xhat.data[(static_cast<int64_t>(b) * channels + c) * spatial];
        T* xp = &gx.data[(static_cast<int64_t>(b) * channels + c) * spatial];
        for (int64_t i = 0; i < spatial; ++i) {
          xp[i] = g * istd / m * (m * gp[i] - sum_gy - hp[i] * sum_gy_xhat);
        }
      }
    }
    return gx;
  }
};

// ---------------------------------------------------------------------------
template <typename T>
struct Relu {
  Tensor<T> input;
  Tensor<T> forward(const Tensor<T>& x) {
    input = x;
    Tensor<T> y(x.shape);
    for (size_t i = 0; i < x.data.size(); ++i) y.data[i] = x.data[i] > T(0) ? x.data[i] : T(0);
    return y;
  }
  Tensor<T> backward(const Tensor<T>& gy) {
    Tensor<T> gx(gy.shape);
    for (size_t i = 0; i < gy.data.size(); ++i) {
      gx.data[i] = input.data[i] > T(0) ? gy.data[i] : T(0);
    }
    return gx;
  }
};

// ---------------------------------------------------------------------------
// Bilinear x2 upsampling with half-pixel sampling on (N, C, H, W).
template <typename T>
struct Upsample2x {
  std::vector<int> in_shape;

  static void coeffs(int out, int in, int o, int& i0, int& i1, T& w1) {
    T src = (static_cast<T>(o) + T(0.5)) / T(2) - T(0.5);
    T f = std::floor(src);
    i0 = static_cast<int>(f);
    w1 = src - f;
    i1 = i0 + 1;
    if (i0 < 0) i0 = 0;
    if (i1 < 0) i1 = 0;
    if (i0 > in - 1) i0 = in - 1;
    if (i1 > in - 1) i1 = in - 1;
    (void)out;
  }

  Tensor<T> forward(const Tensor<T>& x) {
    in_shape = x.shape;
    int n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
    int oh = h * 2, ow = w * 2;
    Tensor<T> y({n, c, oh, ow});
    for (int b = 0; b < n; ++b) {
      for (int ch = 0; ch < c; ++ch) {
        const T* xp = &x.data[(static_cast<int64_t>(b) * c + ch) * h * w];
        T* yp = &y.data[(static_cast<int64_t>(b) * c + ch) * oh * ow];
        for (int oy = 0; oy < oh; ++oy) {
          int y0, y1;
          T wy;
          coeffs(oh, h, oy, y0, y1, wy);
          for (int ox = 0; ox < ow; ++ox) {
            int x0, x1;
            T wx;
            coeffs(ow, w, ox, x0, x1, wx);
            yp[static_cast<int64_t>(oy) * ow + ox] =
                (T(1) - wy) * ((T(1) - wx) * xp[static_cast<int64_t>(y0) * w + x0] +
                               wx * xp[static_cast<int64_t>(y0) * w + x1]) +
                wy * ((T(1) - wx) * xp[static_cast<int64_t>(y1) * w + x0] +
                      wx * xp[static_cast<int64_t>(y1) * w + x1]);
          }
        }
      }
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& gy) {
    int n = in_shape[0], c = in_shape[1], h = in_shape[2], w = in_shape[3];
    int oh = h * 2, ow = w * 2;
    Tensor<T> gx(in_shape);
    for (int b = 0; b < n; ++b) {
      for (int ch = 0; ch < c; ++ch) {
        T* xp = &gx.data[(static_cast<int64_t>(b) * c + ch) * h * w];
        const T* yp = &gy.data[(static_cast<int64_t>(b) * c + ch) * oh * ow];
        for (int oy = 0; oy < oh; ++oy) {
          int y0, y1;
          T wy;
          coeffs(oh, h, oy, y0, y1, wy);
          for (int ox = 0; ox < ow; ++ox) {
            int x0, x1;
            T wx;
            coeffs(ow, w, ox, x0, x1, wx);
            T g = yp[static_cast<int64_t>(oy) * ow + ox];
            xp[static_cast<int64_t>(y0) * w + x0] += (T(1) - wy) * (T(1) - wx) * g;
            xp[static_cast<int64_t>(y0) * w + x1] += (T(1) - wy) * wx * g;
            xp[static_cast<int64_t>(y1) * w + x0] += wy * (T(1) - wx) * g;
            xp[static_cast<int64_t>(y1) * w + x1] += wy * wx * g;
          }
        }
      }
    }
    return gx;
  }
};

// ---------------------------------------------------------------------------
// Mean over every axis after the channel one: (N, C, ...) -> (N, C).
template <typename T>
struct GlobalAvgPool {
  std::vector<int> in_shape;
  Tensor<T> forward(const Tensor<T>& x) {
    in_shape = x.shape;
    int n = x.dim(0), c = x.dim(1);
    int64_t spatial = x.numel() / (static_cast<int64_t>(n) * c);
    Tensor<T> y({n, c});
    for (int b = 0; b < n; ++b) {
      for (int ch = 0; ch < c; ++ch) {
        const T* xp = &x.data[(static_cast<int64_t>(b) * c + ch) * spatial];
        T sum = 0;
        for (int64_t i = 0; i < spatial; ++i) sum += xp[i];
        y.data[static_cast<size_t>(static_cast<int64_t>(b) * c + ch)] = sum / static_cast<T>(spatial);
      }
    }
    return y;
  }
  Tensor<T> backward(const Tensor<T>& gy) {
    int n = in_shape[0], c = in_shape[1];
    int64_t spatial = Tensor<T>::numel_of(in_shape) / (static_cast<int64_t>(n) * c);
    Tensor<T> gx(in_shape);
    for (int b = 0; b < n; ++b) {
      for (int ch = 0; ch < c; ++ch) {
        T g = gy.data[static_cast<size_t>(static_cast<int64_t>(b) * c + ch)] / static_cast<T>(spatial);
        T* xp = &gx.data[(static_cast<int64_t>(b) * c + ch) * spatial];
        for (int64_t i = 0; i < spatial; ++i) xp[i] = g;
      }
    }
    return gx;
  }
};

// ---------------------------------------------------------------------------
// Softmax over the H*W plane of an (N, 1, H, W) logit tensor.
template <typename T>
struct SpatialSoftmax {
  Tensor<T> output;
  Tensor<T> forward(const Tensor<T>& x) {
    int n = x.dim(0);
    int64_t plane = x.numel() / n;
    Tensor<T> y(x.shape);
    for (int b = 0; b < n; ++b) {
      const T* xp = &x.data[static_cast<int64_t>(b) * plane];
      T* yp = &y.data[static_cast<int64_t>(b) * plane];
      T mx = xp[0];
      for (int64_t i = 1; i < plane; ++i) mx = std::max(mx, xp[i]);
      T sum = 0;
      for (int64_t i = 0; i < plane; ++i) {
        yp[i] = std::exp(xp[i] - mx);
        sum += yp[i];
      }
      for (int64_t i = 0; i < plane; ++i) yp[i] /= sum;
    }
    output = y;
    return y;
  }
  // dL/dz_i = S_i (dL/dS_i - sum_j S_j dL/dS_j)
  Tensor<T> backward(const Tensor<T>& gy) {
    int n = gy.dim(0);
    int64_t plane = gy.numel() / n;
    Tensor<T> gx(gy.shape);
    for (int b = 0; b < n; ++b) {
      const T* gp = &gy.data[static_cast<int64_t>(b) * plane];
      const T* sp = &output.data[static_cast<int64_t>(b) * plane];
      T* xp = &gx.data[static_cast<int64_t>(b) * plane];
      T dot = 0;
      for (int64_t i = 0; i < plane; ++i) dot += sp[i] * gp[i];
      for (int64_t i = 0; i < plane; ++i) xp[i] = sp[i] * (gp[i] - dot);
    }
    return gx;
  }
};

}  // namespace avsal::nn
