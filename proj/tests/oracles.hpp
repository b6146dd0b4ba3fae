#pragma once

// Brute-force reference implementations used as test oracles. Written
// independently of the library's kernel/GEMM path: plain loops only.

#include <algorithm>
#include <cmath>
#include <vector>

#include "sonarsynth/tensor.hpp"

namespace oracles {

using sonarsynth::Tensor;

inline int coord(int t, int size, bool reflect) {
  if (t >= 0 && t < size) return t;
  if (!reflect) return -1;
  return t < 0 ? -t : 2 * size - 2 - t;
}

// Direct convolution, weight {OC, IC, K, K}.
inline Tensor conv2d_naive(const Tensor& x, const Tensor& w, const Tensor& b,
                           int stride, int pad, bool reflect) {
  const int ic = x.dim(0), h = x.dim(1), ww = x.dim(2);
  const int oc = w.dim(0), k = w.dim(2);
  const int oh = (h + 2 * pad - k) / stride + 1;
  const int ow = (ww + 2 * pad - k) / stride + 1;
  Tensor y({oc, oh, ow});
  for (int o = 0; o < oc; ++o) {
    for (int oy = 0; oy < oh; ++oy) {
      for (int ox = 0; ox < ow; ++ox) {
        double s = b[o];
        for (int c = 0; c < ic; ++c) {
          for (int ky = 0; ky < k; ++ky) {
            const int iy = coord(oy * stride - pad + ky, h, reflect);
            if (iy < 0) continue;
            for (int kx = 0; kx < k; ++kx) {
              const int ix = coord(ox * stride - pad + kx, ww, reflect);
              if (ix < 0) continue;
              s += x.at(c, iy, ix) * w.at(o, c, ky, kx);
            }
          }
        }
        y.at(o, oy, ox) = s;
      }
    }
  }
  return y;
}

// Direct transposed convolution (scatter form), weight {IC, OC, K, K}.
inline Tensor convtranspose2d_naive(const Tensor& x, const Tensor& w,
                                    const Tensor& b, int stride, int pad,
                                    int out_pad) {
  const int ic = x.dim(0), h = x.dim(1), ww = x.dim(2);
  const int oc = w.dim(1), k = w.dim(2);
  const int oh = (h - 1) * stride - 2 * pad + k + out_pad;
  const int ow = (ww - 1) * stride - 2 * pad + k + out_pad;
  Tensor y({oc, oh, ow});
  for (int o = 0; o < oc; ++o) {
    for (int oy = 0; oy < oh; ++oy)
      for (int ox = 0; ox < ow; ++ox) y.at(o, oy, ox) = b[o];
  }
  for (int c = 0; c < ic; ++c) {
    for (int iy = 0; iy < h; ++iy) {
      for (int ix = 0; ix < ww; ++ix) {
        const double v = x.at(c, iy, ix);
        for (int o = 0; o < oc; ++o) {
          for (int ky = 0; ky < k; ++ky) {
            const int oy = iy * stride - pad + ky;
            if (oy < 0 || oy >= oh) continue;
            for (int kx = 0; kx < k; ++kx) {
              const int ox = ix * stride - pad + kx;
              if (ox < 0 || ox >= ow) continue;
              y.at(o, oy, ox) += v * w.at(c, o, ky, kx);
            }
          }
        }
      }
    }
  }
  return y;
}

// Gram matrix by explicit channel-pair double loop.
inline Tensor gram_naive(const Tensor& f) {
  const int c = f.dim(0), h = f.dim(1), w = f.dim(2);
  Tensor g({c, c});
  for (int a = 0; a < c; ++a) {
    for (int b2 = 0; b2 < c; ++b2) {
      double s = 0.0;
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) s += f.at(a, y, x) * f.at(b2, y, x);
      g.at(a, b2) = s / (static_cast<double>(c) * h * w);
    }
  }
  return g;
}

inline double mse_naive(const Tensor& a, const Tensor& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.numel(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s / static_cast<double>(a.numel());
}

inline double tv_naive(const Tensor& img) {
  const int c = img.dim(0), h = img.dim(1), w = img.dim(2);
  double s = 0.0;
  for (int ch = 0; ch < c; ++ch) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x + 1 < w; ++x) {
        const double d = img.at(ch, y, x + 1) - img.at(ch, y, x);
        s += d * d;
      }
    }
    for (int y = 0; y + 1 < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double d = img.at(ch, y + 1, x) - img.at(ch, y, x);
        s += d * d;
      }
    }
  }
  return s / static_cast<double>(img.numel());
}

// Grayscale top-k by full sort.
inline std::vector<double> topk_naive(const Tensor& img, int k) {
  const int h = img.dim(1), w = img.dim(2);
  std::vector<double> gray(static_cast<std::size_t>(h) * w);
  if (img.dim(0) == 1) {
    gray.assign(img.data(), img.data() + gray.size());
  } else {
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        gray[static_cast<std::size_t>(y) * w + x] = 0.299 * img.at(0, y, x) +
                                                    0.587 * img.at(1, y, x) +
                                                    0.114 * img.at(2, y, x);
  }
  std::sort(gray.begin(), gray.end(), std::greater<double>());
  gray.resize(k);
  return gray;
}

inline double atki_naive(const Tensor& out, const Tensor& style, int k) {
  const auto a = topk_naive(out, k);
  const auto b = topk_naive(style, k);
  double s = 0.0;
  for (int j = 0; j < k; ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return s / k;
}

}  // namespace oracles
