#include "sonarsynth/layers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sonarsynth/kernels.hpp"
#include "sonarsynth/parallel.hpp"

namespace sonarsynth {

namespace {

// Maps a possibly out-of-range coordinate into [0, size).
// Returns -1 for zero padding (contribution dropped).
inline int pad_coord(int t, int size, PadMode mode) {
  if (t >= 0 && t < size) return t;
  if (mode == PadMode::zero) return -1;
  // single reflection without edge repeat; valid while pad < size
  return t < 0 ? -t : 2 * size - 2 - t;
}

}  // namespace

int conv_out_size(int in, int k, int stride, int pad) {
  return (in + 2 * pad - k) / stride + 1;
}

void im2col(const Tensor& x, int k, int stride, int pad, PadMode mode,
            Tensor& col) {
  const int ch = x.dim(0), h = x.dim(1), w = x.dim(2);
  const int oh = conv_out_size(h, k, stride, pad);
  const int ow = conv_out_size(w, k, stride, pad);
  const int rows = ch * k * k;
  if (col.ndim() != 2 || col.dim(0) != rows || col.dim(1) != oh * ow) {
    col = Tensor({rows, oh * ow});
  }
  const double* src = x.data();
  double* dst = col.data();
  parallel_ranges(rows, [&](int r_lo, int r_hi) {
    for (int r = r_lo; r < r_hi; ++r) {
      const int c = r / (k * k);
      const int ky = (r / k) % k;
      const int kx = r % k;
      const double* plane = src + static_cast<std::size_t>(c) * h * w;
      double* out_row = dst + static_cast<std::size_t>(r) * oh * ow;
      for (int oy = 0; oy < oh; ++oy) {
        const int iy = pad_coord(oy * stride - pad + ky, h, mode);
        if (iy < 0) {
          std::fill(out_row + static_cast<std::size_t>(oy) * ow,
                    out_row + static_cast<std::size_t>(oy) * ow + ow, 0.0);
          continue;
        }
        const double* in_row = plane + static_cast<std::size_t>(iy) * w;
        for (int ox = 0; ox < ow; ++ox) {
          const int ix = pad_coord(ox * stride - pad + kx, w, mode);
          out_row[static_cast<std::size_t>(oy) * ow + ox] =
              ix < 0 ? 0.0 : in_row[ix];
        }
      }
    }
  });
}

void col2im(const Tensor& col, int k, int stride, int pad, PadMode mode,
            Tensor& x) {
  const int ch = x.dim(0), h = x.dim(1), w = x.dim(2);
  const int oh = conv_out_size(h, k, stride, pad);
  const int ow = conv_out_size(w, k, stride, pad);
  const double* src = col.data();
  double* dst = x.data();
  // one task per channel: all k*k rows of a channel funnel into one plane,
  // so writes across tasks never collide
  parallel_ranges(ch, [&](int c_lo, int c_hi) {
    for (int c = c_lo; c < c_hi; ++c) {
      double* plane = dst + static_cast<std::size_t>(c) * h * w;
      for (int ky = 0; ky < k; ++ky) {
        for (int kx = 0; kx < k; ++kx) {
          const int r = (c * k + ky) * k + kx;
          const double* in_row = src + static_cast<std::size_t>(r) * oh * ow;
          for (int oy = 0; oy < oh; ++oy) {
            const int iy = pad_coord(oy * stride - pad + ky, h, mode);
            if (iy < 0) continue;
            double* row = plane + static_cast<std::size_t>(iy) * w;
            for (int ox = 0; ox < ow; ++ox) {
              const int ix = pad_coord(ox * stride - pad + kx, w, mode);
              if (ix >= 0) row[ix] += in_row[static_cast<std::size_t>(oy) * ow + ox];
            }
          }
        }
      }
    }
  });
}

void fan_in_uniform(Tensor& w, int fan_in, Rng& rng) {
  const double bound = std::sqrt(3.0 / fan_in);
  for (std::size_t i = 0; i < w.numel(); ++i) w[i] = rng.uniform(-bound, bound);
}

// --------------------------------------------------------------------------
// Conv2d
// --------------------------------------------------------------------------

Conv2d::Conv2d(int in_ch, int out_ch, int ksize, int stride, int pad,
               PadMode mode)
    : in_ch_(in_ch), out_ch_(out_ch), k_(ksize), stride_(stride), pad_(pad),
      mode_(mode) {
  weight.name = "weight";
  weight.value = Tensor({out_ch, in_ch, ksize, ksize});
  weight.grad = Tensor({out_ch, in_ch, ksize, ksize});
  bias.name = "bias";
  bias.value = Tensor({out_ch});
  bias.grad = Tensor({out_ch});
}

void Conv2d::init(Rng& rng) {
  fan_in_uniform(weight.value, in_ch_ * k_ * k_, rng);
  bias.value.zero();
}

void Conv2d::collect_params(std::vector<Param*>& out) {
  out.push_back(&weight);
  out.push_back(&bias);
}

Tensor Conv2d::forward(const Tensor& x) {
  if (x.ndim() != 3 || x.dim(0) != in_ch_) {
    throw std::invalid_argument("Conv2d: bad input shape " + x.shape_str());
  }
  in_h_ = x.dim(1);
  in_w_ = x.dim(2);
  const int oh = conv_out_size(in_h_, k_, stride_, pad_);
  const int ow = conv_out_size(in_w_, k_, stride_, pad_);
  im2col(x, k_, stride_, pad_, mode_, col_);

  Tensor y({out_ch_, oh, ow});
  const int kdim = in_ch_ * k_ * k_;
  kernels::gemm(false, false, out_ch_, oh * ow, kdim, weight.value.data(), kdim,
                col_.data(), oh * ow, y.data(), oh * ow, false);
  double* ydata = y.data();
  for (int oc = 0; oc < out_ch_; ++oc) {
    const double b = bias.value[oc];
    double* row = ydata + static_cast<std::size_t>(oc) * oh * ow;
    for (int i = 0; i < oh * ow; ++i) row[i] += b;
  }
  return y;
}

Tensor Conv2d::backward(const Tensor& dy) {
  const int oh = dy.dim(1), ow = dy.dim(2);
  const int kdim = in_ch_ * k_ * k_;
  // dW += dy * col^T
  kernels::gemm(false, true, out_ch_, kdim, oh * ow, dy.data(), oh * ow,
                col_.data(), oh * ow, weight.grad.data(), kdim, true);
  for (int oc = 0; oc < out_ch_; ++oc) {
    const double* row = dy.data() + static_cast<std::size_t>(oc) * oh * ow;
    double s = 0.0;
    for (int i = 0; i < oh * ow; ++i) s += row[i];
    bias.grad[oc] += s;
  }
  // dcol = W^T * dy, then scatter back to input geometry
  Tensor dcol({kdim, oh * ow});
  kernels::gemm(true, false, kdim, oh * ow, out_ch_, weight.value.data(), kdim,
                dy.data(), oh * ow, dcol.data(), oh * ow, false);
  Tensor dx({in_ch_, in_h_, in_w_});
  col2im(dcol, k_, stride_, pad_, mode_, dx);
  return dx;
}

// --------------------------------------------------------------------------
// ConvTranspose2d
// --------------------------------------------------------------------------

ConvTranspose2d::ConvTranspose2d(int in_ch, int out_ch, int ksize, int stride,
                                 int pad, int out_pad)
    : in_ch_(in_ch), out_ch_(out_ch), k_(ksize), stride_(stride), pad_(pad),
      out_pad_(out_pad) {
  weight.name = "weight";
  weight.value = Tensor({in_ch, out_ch, ksize, ksize});
  weight.grad = Tensor({in_ch, out_ch, ksize, ksize});
  bias.name = "bias";
  bias.value = Tensor({out_ch});
  bias.grad = Tensor({out_ch});
}

void ConvTranspose2d::init(Rng& rng) {
  fan_in_uniform(weight.value, in_ch_ * k_ * k_, rng);
  bias.value.zero();
}

void ConvTranspose2d::collect_params(std::vector<Param*>& out) {
  out.push_back(&weight);
  out.push_back(&bias);
}

Tensor ConvTranspose2d::forward(const Tensor& x) {
  if (x.ndim() != 3 || x.dim(0) != in_ch_) {
    throw std::invalid_argument("ConvTranspose2d: bad input shape " +
                                x.shape_str());
  }
  x_ = x;
  const int h = x.dim(1), w = x.dim(2);
  const int out_h = (h - 1) * stride_ - 2 * pad_ + k_ + out_pad_;
  const int out_w = (w - 1) * stride_ - 2 * pad_ + k_ + out_pad_;
  const int kdim = out_ch_ * k_ * k_;

  // col = W^T x, viewing W as [in_ch, out_ch*k*k]
  Tensor col({kdim, h * w});
  kernels::gemm(true, false, kdim, h * w, in_ch_, weight.value.data(), kdim,
                x.data(), h * w, col.data(), h * w, false);

  Tensor y({out_ch_, out_h, out_w});
  col2im(col, k_, stride_, pad_, PadMode::zero, y);
  double* ydata = y.data();
  for (int oc = 0; oc < out_ch_; ++oc) {
    const double b = bias.value[oc];
    double* plane = ydata + static_cast<std::size_t>(oc) * out_h * out_w;
    for (int i = 0; i < out_h * out_w; ++i) plane[i] += b;
  }
  return y;
}

Tensor ConvTranspose2d::backward(const Tensor& dy) {
  const int h = x_.dim(1), w = x_.dim(2);
  const int out_h = dy.dim(1), out_w = dy.dim(2);
  const int kdim = out_ch_ * k_ * k_;

  Tensor colg;
  im2col(dy, k_, stride_, pad_, PadMode::zero, colg);  // {kdim, h*w}

  // dW += x * colg^T, viewing dW as [in_ch, out_ch*k*k]
  kernels::gemm(false, true, in_ch_, kdim, h * w, x_.data(), h * w,
                colg.data(), h * w, weight.grad.data(), kdim, true);
  for (int oc = 0; oc < out_ch_; ++oc) {
    const double* plane =
        dy.data() + static_cast<std::size_t>(oc) * out_h * out_w;
    double s = 0.0;
    for (int i = 0; i < out_h * out_w; ++i) s += plane[i];
    bias.grad[oc] += s;
  }

  Tensor dx({in_ch_, h, w});
  kernels::gemm(false, false, in_ch_, h * w, kdim, weight.value.data(), kdim,
                colg.data(), h * w, dx.data(), h * w, false);
  return dx;
}

// --------------------------------------------------------------------------
// InstanceNorm
// --------------------------------------------------------------------------

InstanceNorm::InstanceNorm(int channels, double eps)
    : channels_(channels), eps_(eps) {
  gamma.name = "gamma";
  gamma.value = Tensor::full({channels}, 1.0);
  gamma.grad = Tensor({channels});
  beta.name = "beta";
  beta.value = Tensor({channels});
  beta.grad = Tensor({channels});
}

void InstanceNorm::collect_params(std::vector<Param*>& out) {
  out.push_back(&gamma);
  out.push_back(&beta);
}

Tensor InstanceNorm::forward(const Tensor& x) {
  if (x.ndim() != 3 || x.dim(0) != channels_) {
    throw std::invalid_argument("InstanceNorm: bad input shape " +
                                x.shape_str());
  }
  const int n = x.dim(1) * x.dim(2);
  xhat_ = Tensor(x.shape());
  inv_std_.assign(channels_, 0.0);
  Tensor y(x.shape());
  const double* src = x.data();
  double* xh = xhat_.data();
  double* dst = y.data();
  parallel_ranges(channels_, [&](int c_lo, int c_hi) {
    for (int c = c_lo; c < c_hi; ++c) {
      const double* p = src + static_cast<std::size_t>(c) * n;
      double mean = 0.0;
      for (int i = 0; i < n; ++i) mean += p[i];
      mean /= n;
      double var = 0.0;
      for (int i = 0; i < n; ++i) {
        const double d = p[i] - mean;
        var += d * d;
      }
      var /= n;
      const double istd = 1.0 / std::sqrt(var + eps_);
      inv_std_[c] = istd;
      const double g = gamma.value[c], b = beta.value[c];
      double* xhrow = xh + static_cast<std::size_t>(c) * n;
      double* yrow = dst + static_cast<std::size_t>(c) * n;
      for (int i = 0; i < n; ++i) {
        const double v = (p[i] - mean) * istd;
        xhrow[i] = v;
        yrow[i] = g * v + b;
      }
    }
  });
  return y;
}

Tensor InstanceNorm::backward(const Tensor& dy) {
  const int n = dy.dim(1) * dy.dim(2);
  Tensor dx(dy.shape());
  const double* dyd = dy.data();
  const double* xh = xhat_.data();
  double* dxd = dx.data();
  parallel_ranges(channels_, [&](int c_lo, int c_hi) {
    for (int c = c_lo; c < c_hi; ++c) {
      const double* dyrow = dyd + static_cast<std::size_t>(c) * n;
      const double* xhrow = xh + static_cast<std::size_t>(c) * n;
      double s1 = 0.0, s2 = 0.0;
      for (int i = 0; i < n; ++i) {
        s1 += dyrow[i];
        s2 += dyrow[i] * xhrow[i];
      }
      gamma.grad[c] += s2;
      beta.grad[c] += s1;
      const double scale = gamma.value[c] * inv_std_[c];
      const double m1 = s1 / n, m2 = s2 / n;
      double* dxrow = dxd + static_cast<std::size_t>(c) * n;
      for (int i = 0; i < n; ++i) {
        dxrow[i] = scale * (dyrow[i] - m1 - xhrow[i] * m2);
      }
    }
  });
  return dx;
}

// --------------------------------------------------------------------------
// Activations
// --------------------------------------------------------------------------

Tensor ReLU::forward(const Tensor& x) {
  y_ = Tensor(x.shape());
  const double* src = x.data();
  double* dst = y_.data();
  const std::size_t n = x.numel();
  for (std::size_t i = 0; i < n; ++i) dst[i] = src[i] > 0.0 ? src[i] : 0.0;
  return y_;
}

Tensor ReLU::backward(const Tensor& dy) {
  Tensor dx(dy.shape());
  const double* d = dy.data();
  const double* y = y_.data();
  double* o = dx.data();
  const std::size_t n = dy.numel();
  for (std::size_t i = 0; i < n; ++i) o[i] = y[i] > 0.0 ? d[i] : 0.0;
  return dx;
}

Tensor Sigmoid::forward(const Tensor& x) {
  y_ = Tensor(x.shape());
  const double* src = x.data();
  double* dst = y_.data();
  const std::size_t n = x.numel();
  for (std::size_t i = 0; i < n; ++i) dst[i] = 1.0 / (1.0 + std::exp(-src[i]));
  return y_;
}

Tensor Sigmoid::backward(const Tensor& dy) {
  Tensor dx(dy.shape());
  const double* d = dy.data();
  const double* y = y_.data();
  double* o = dx.data();
  const std::size_t n = dy.numel();
  for (std::size_t i = 0; i < n; ++i) o[i] = d[i] * y[i] * (1.0 - y[i]);
  return dx;
}

// --------------------------------------------------------------------------
// MaxPool2d
// --------------------------------------------------------------------------

MaxPool2d::MaxPool2d(int ksize, int stride, int pad)
    : k_(ksize), stride_(stride), pad_(pad) {}

Tensor MaxPool2d::forward(const Tensor& x) {
  const int ch = x.dim(0), h = x.dim(1), w = x.dim(2);
  const int oh = conv_out_size(h, k_, stride_, pad_);
  const int ow = conv_out_size(w, k_, stride_, pad_);
  in_shape_ = x.shape();
  Tensor y({ch, oh, ow});
  argmax_.assign(static_cast<std::size_t>(ch) * oh * ow, -1);
  for (int c = 0; c < ch; ++c) {
    const double* plane = x.data() + static_cast<std::size_t>(c) * h * w;
    for (int oy = 0; oy < oh; ++oy) {
      for (int ox = 0; ox < ow; ++ox) {
        double best = -std::numeric_limits<double>::infinity();
        int best_idx = -1;
        for (int ky = 0; ky < k_; ++ky) {
          const int iy = oy * stride_ - pad_ + ky;
          if (iy < 0 || iy >= h) continue;
          for (int kx = 0; kx < k_; ++kx) {
            const int ix = ox * stride_ - pad_ + kx;
            if (ix < 0 || ix >= w) continue;
            const double v = plane[static_cast<std::size_t>(iy) * w + ix];
            if (v > best) {
              best = v;
              best_idx = iy * w + ix;
            }
          }
        }
        y.at(c, oy, ox) = best;
        argmax_[(static_cast<std::size_t>(c) * oh + oy) * ow + ox] = best_idx;
      }
    }
  }
  return y;
}

Tensor MaxPool2d::backward(const Tensor& dy) {
  const int ch = in_shape_[0], h = in_shape_[1], w = in_shape_[2];
  const int oh = dy.dim(1), ow = dy.dim(2);
  Tensor dx({ch, h, w});
  for (int c = 0; c < ch; ++c) {
    double* plane = dx.data() + static_cast<std::size_t>(c) * h * w;
    for (int i = 0; i < oh * ow; ++i) {
      const int idx = argmax_[static_cast<std::size_t>(c) * oh * ow + i];
      if (idx >= 0) plane[idx] += dy.data()[static_cast<std::size_t>(c) * oh * ow + i];
    }
  }
  return dx;
}

// --------------------------------------------------------------------------
// Flatten / Linear / Softmax
// --------------------------------------------------------------------------

Tensor Flatten::forward(const Tensor& x) {
  in_shape_ = x.shape();
  Tensor y({static_cast<int>(x.numel())});
  std::copy(x.data(), x.data() + x.numel(), y.data());
  return y;
}

Tensor Flatten::backward(const Tensor& dy) {
  Tensor dx(in_shape_);
  std::copy(dy.data(), dy.data() + dy.numel(), dx.data());
  return dx;
}

Linear::Linear(int in_dim, int out_dim) : in_dim_(in_dim), out_dim_(out_dim) {
  weight.name = "weight";
  weight.value = Tensor({out_dim, in_dim});
  weight.grad = Tensor({out_dim, in_dim});
  bias.name = "bias";
  bias.value = Tensor({out_dim});
  bias.grad = Tensor({out_dim});
}

void Linear::init(Rng& rng) {
  fan_in_uniform(weight.value, in_dim_, rng);
  bias.value.zero();
}

void Linear::collect_params(std::vector<Param*>& out) {
  out.push_back(&weight);
  out.push_back(&bias);
}

Tensor Linear::forward(const Tensor& x) {
  if (static_cast<int>(x.numel()) != in_dim_) {
    throw std::invalid_argument("Linear: bad input size");
  }
  x_ = x;
  Tensor y({out_dim_});
  for (int o = 0; o < out_dim_; ++o) {
    const double* wrow = weight.value.data() + static_cast<std::size_t>(o) * in_dim_;
    double s = bias.value[o];
    for (int i = 0; i < in_dim_; ++i) s += wrow[i] * x[i];
    y[o] = s;
  }
  return y;
}

Tensor Linear::backward(const Tensor& dy) {
  Tensor dx({in_dim_});
  for (int o = 0; o < out_dim_; ++o) {
    const double g = dy[o];
    bias.grad[o] += g;
    double* grow = weight.grad.data() + static_cast<std::size_t>(o) * in_dim_;
    const double* wrow = weight.value.data() + static_cast<std::size_t>(o) * in_dim_;
    for (int i = 0; i < in_dim_; ++i) {
      grow[i] += g * x_[i];
      dx[i] += g * wrow[i];
    }
  }
  return dx;
}

Tensor Softmax::forward(const Tensor& x) {
  y_ = Tensor(x.shape());
  const std::size_t n = x.numel();
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) mx = std::max(mx, x[i]);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    y_[i] = std::exp(x[i] - mx);
    sum += y_[i];
  }
  for (std::size_t i = 0; i < n; ++i) y_[i] /= sum;
  return y_;
}

Tensor Softmax::backward(const Tensor& dy) {
  const std::size_t n = dy.numel();
  double dot = 0.0;
  for (std::size_t i = 0; i < n; ++i) dot += dy[i] * y_[i];
  Tensor dx(dy.shape());
  for (std::size_t i = 0; i < n; ++i) dx[i] = y_[i] * (dy[i] - dot);
  return dx;
}

// --------------------------------------------------------------------------
// Sequential
// --------------------------------------------------------------------------

Tensor Sequential::forward(const Tensor& x) {
  Tensor cur = x;
  for (auto& l : layers_) cur = l->forward(cur);
  return cur;
}

Tensor Sequential::backward(const Tensor& dy) {
  Tensor cur = dy;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) {
    cur = (*it)->backward(cur);
  }
  return cur;
}

void Sequential::collect_params(std::vector<Param*>& out) {
  for (auto& l : layers_) l->collect_params(out);
}

void Sequential::init(Rng& rng) {
  for (auto& l : layers_) l->init(rng);
}

}  // namespace sonarsynth
