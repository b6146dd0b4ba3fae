#pragma once

// Shared blocked-GEMM driver. Each ISA translation unit instantiates it with
// its own microkernel (MR x NR register tile). Panels are zero-padded to full
// microkernel width so edges reuse the same code path for packing; partial
// tiles are finished by a scalar edge kernel.
//
// Work is split across the thread pool by contiguous MR-aligned row ranges;
// k-slabs are processed sequentially, so each C element sees a fixed
// accumulation order no matter how many threads run.

#include <algorithm>
#include <vector>

#include "sonarsynth/parallel.hpp"

namespace sonarsynth::kernels::detail {

inline void pack_a_block(const double* a, int lda, bool trans, int i0, int mc,
                         int k0, int kk, int mr, double* out) {
  const int panels = (mc + mr - 1) / mr;
  for (int pi = 0; pi < panels; ++pi) {
    double* dst = out + static_cast<std::size_t>(pi) * kk * mr;
    const int rows = std::min(mr, mc - pi * mr);
    for (int p = 0; p < kk; ++p) {
      for (int r = 0; r < mr; ++r) {
        double v = 0.0;
        if (r < rows) {
          const int i = i0 + pi * mr + r;
          v = trans ? a[static_cast<std::size_t>(k0 + p) * lda + i]
                    : a[static_cast<std::size_t>(i) * lda + (k0 + p)];
        }
        dst[static_cast<std::size_t>(p) * mr + r] = v;
      }
    }
  }
}

inline void pack_b_block(const double* b, int ldb, bool trans, int j0, int nc,
                         int k0, int kk, int nr, double* out) {
  const int panels = (nc + nr - 1) / nr;
  for (int pj = 0; pj < panels; ++pj) {
    double* dst = out + static_cast<std::size_t>(pj) * kk * nr;
    const int cols = std::min(nr, nc - pj * nr);
    for (int p = 0; p < kk; ++p) {
      for (int q = 0; q < nr; ++q) {
        double v = 0.0;
        if (q < cols) {
          const int j = j0 + pj * nr + q;
          v = trans ? b[static_cast<std::size_t>(j) * ldb + (k0 + p)]
                    : b[static_cast<std::size_t>(k0 + p) * ldb + j];
        }
        dst[static_cast<std::size_t>(p) * nr + q] = v;
      }
    }
  }
}

// Partial tile: plain loops over the valid region only.
inline void edge_tile(int kk, const double* ap, const double* bp, int mr,
                      int nr, int vm, int vn, double* c, int ldc,
                      bool overwrite) {
  double acc[32 * 32];
  for (int r = 0; r < vm; ++r)
    for (int q = 0; q < vn; ++q) acc[r * vn + q] = 0.0;
  for (int p = 0; p < kk; ++p) {
    const double* arow = ap + static_cast<std::size_t>(p) * mr;
    const double* brow = bp + static_cast<std::size_t>(p) * nr;
    for (int r = 0; r < vm; ++r) {
      const double av = arow[r];
      for (int q = 0; q < vn; ++q) acc[r * vn + q] += av * brow[q];
    }
  }
  for (int r = 0; r < vm; ++r) {
    double* crow = c + static_cast<std::size_t>(r) * ldc;
    if (overwrite) {
      for (int q = 0; q < vn; ++q) crow[q] = acc[r * vn + q];
    } else {
      for (int q = 0; q < vn; ++q) crow[q] += acc[r * vn + q];
    }
  }
}

template <class MK>
void gemm_driver(bool trans_a, bool trans_b, int m, int n, int k,
                 const double* a, int lda, const double* b, int ldb, double* c,
                 int ldc, bool accumulate) {
  constexpr int MR = MK::MR;
  constexpr int NR = MK::NR;
  constexpr int KC = 320;
  constexpr int NC = 512;
  constexpr int MC = 128;
  static_assert(MC % MR == 0);

  if (m <= 0 || n <= 0) return;
  if (k <= 0) {
    if (!accumulate) {
      for (int i = 0; i < m; ++i)
        std::fill(c + static_cast<std::size_t>(i) * ldc,
                  c + static_cast<std::size_t>(i) * ldc + n, 0.0);
    }
    return;
  }

  std::vector<double> bpack(static_cast<std::size_t>((NC + NR - 1) / NR) * NR *
                            KC);

  for (int jc = 0; jc < n; jc += NC) {
    const int nc = std::min(NC, n - jc);
    const int np = (nc + NR - 1) / NR;
    for (int kc = 0; kc < k; kc += KC) {
      const int kk = std::min(KC, k - kc);
      const bool overwrite = (kc == 0) && !accumulate;
      pack_b_block(b, ldb, trans_b, jc, nc, kc, kk, NR, bpack.data());

      ThreadPool::instance().run([&](int part, int nparts) {
        // MR-aligned contiguous row range for this part
        const int strips = (m + MR - 1) / MR;
        const int per = (strips + nparts - 1) / nparts;
        const int row_lo = std::min(m, part * per * MR);
        const int row_hi = std::min(m, (part + 1) * per * MR);
        if (row_lo >= row_hi) return;

        thread_local std::vector<double> apack;
        apack.resize(static_cast<std::size_t>(MC) * KC);

        for (int ic = row_lo; ic < row_hi; ic += MC) {
          const int mc = std::min(MC, row_hi - ic);
          pack_a_block(a, lda, trans_a, ic, mc, kc, kk, MR, apack.data());
          for (int pj = 0; pj < np; ++pj) {
            const int j0 = jc + pj * NR;
            const int vn = std::min(NR, n - j0);
            const double* bp = bpack.data() + static_cast<std::size_t>(pj) * kk * NR;
            for (int pi = 0; pi * MR < mc; ++pi) {
              const int i0 = ic + pi * MR;
              const int vm = std::min(MR, m - i0);
              const double* ap = apack.data() + static_cast<std::size_t>(pi) * kk * MR;
              double* ct = c + static_cast<std::size_t>(i0) * ldc + j0;
              if (vm == MR && vn == NR) {
                MK::run(kk, ap, bp, ct, ldc, overwrite);
              } else {
                edge_tile(kk, ap, bp, MR, NR, vm, vn, ct, ldc, overwrite);
              }
            }
          }
        }
      });
    }
  }
}

}  // namespace sonarsynth::kernels::detail
