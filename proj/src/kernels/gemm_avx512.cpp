// AVX-512F GEMM variant: 8x16 register tile (16 zmm accumulators).

#include <immintrin.h>

#include "gemm_driver.hpp"
#include "sonarsynth/kernels.hpp"

namespace sonarsynth::kernels::detail {

namespace {

struct MicroAvx512 {
  static constexpr int MR = 8;
  static constexpr int NR = 16;  // two zmm columns

  static void run(int kk, const double* ap, const double* bp, double* c,
                  int ldc, bool overwrite) {
    __m512d acc0[MR], acc1[MR];
    for (int r = 0; r < MR; ++r) {
      acc0[r] = _mm512_setzero_pd();
      acc1[r] = _mm512_setzero_pd();
    }

    for (int p = 0; p < kk; ++p) {
      const __m512d b0 = _mm512_loadu_pd(bp + p * NR);
      const __m512d b1 = _mm512_loadu_pd(bp + p * NR + 8);
      const double* arow = ap + p * MR;
      for (int r = 0; r < MR; ++r) {
        const __m512d av = _mm512_set1_pd(arow[r]);
        acc0[r] = _mm512_fmadd_pd(av, b0, acc0[r]);
        acc1[r] = _mm512_fmadd_pd(av, b1, acc1[r]);
      }
    }

    for (int r = 0; r < MR; ++r) {
      double* crow = c + static_cast<std::size_t>(r) * ldc;
      if (overwrite) {
        _mm512_storeu_pd(crow, acc0[r]);
        _mm512_storeu_pd(crow + 8, acc1[r]);
      } else {
        _mm512_storeu_pd(crow, _mm512_add_pd(_mm512_loadu_pd(crow), acc0[r]));
        _mm512_storeu_pd(crow + 8,
                         _mm512_add_pd(_mm512_loadu_pd(crow + 8), acc1[r]));
      }
    }
  }
};

}  // namespace

void gemm_avx512(bool trans_a, bool trans_b, int m, int n, int k,
                 const double* a, int lda, const double* b, int ldb, double* c,
                 int ldc, bool accumulate) {
  gemm_driver<MicroAvx512>(trans_a, trans_b, m, n, k, a, lda, b, ldb, c, ldc,
                           accumulate);
}

}  // namespace sonarsynth::kernels::detail
