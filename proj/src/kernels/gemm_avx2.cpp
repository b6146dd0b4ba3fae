// AVX2+FMA GEMM variant. Built with -mavx2 -mfma; only ever called after the
// dispatcher verified CPU support.

#include <immintrin.h>

#include "gemm_driver.hpp"
#include "sonarsynth/kernels.hpp"

namespace sonarsynth::kernels::detail {

namespace {

struct MicroAvx2 {
  static constexpr int MR = 4;
  static constexpr int NR = 8;  // two ymm columns

  static void run(int kk, const double* ap, const double* bp, double* c,
                  int ldc, bool overwrite) {
    __m256d c00 = _mm256_setzero_pd(), c01 = _mm256_setzero_pd();
    __m256d c10 = _mm256_setzero_pd(), c11 = _mm256_setzero_pd();
    __m256d c20 = _mm256_setzero_pd(), c21 = _mm256_setzero_pd();
    __m256d c30 = _mm256_setzero_pd(), c31 = _mm256_setzero_pd();

    for (int p = 0; p < kk; ++p) {
      const __m256d b0 = _mm256_loadu_pd(bp + p * NR);
      const __m256d b1 = _mm256_loadu_pd(bp + p * NR + 4);
      const double* arow = ap + p * MR;
      __m256d av;
      av = _mm256_broadcast_sd(arow + 0);
      c00 = _mm256_fmadd_pd(av, b0, c00);
      c01 = _mm256_fmadd_pd(av, b1, c01);
      av = _mm256_broadcast_sd(arow + 1);
      c10 = _mm256_fmadd_pd(av, b0, c10);
      c11 = _mm256_fmadd_pd(av, b1, c11);
      av = _mm256_broadcast_sd(arow + 2);
      c20 = _mm256_fmadd_pd(av, b0, c20);
      c21 = _mm256_fmadd_pd(av, b1, c21);
      av = _mm256_broadcast_sd(arow + 3);
      c30 = _mm256_fmadd_pd(av, b0, c30);
      c31 = _mm256_fmadd_pd(av, b1, c31);
    }

    double* r0 = c;
    double* r1 = c + ldc;
    double* r2 = c + 2 * static_cast<std::size_t>(ldc);
    double* r3 = c + 3 * static_cast<std::size_t>(ldc);
    if (overwrite) {
      _mm256_storeu_pd(r0, c00);
      _mm256_storeu_pd(r0 + 4, c01);
      _mm256_storeu_pd(r1, c10);
      _mm256_storeu_pd(r1 + 4, c11);
      _mm256_storeu_pd(r2, c20);
      _mm256_storeu_pd(r2 + 4, c21);
      _mm256_storeu_pd(r3, c30);
      _mm256_storeu_pd(r3 + 4, c31);
    } else {
      _mm256_storeu_pd(r0, _mm256_add_pd(_mm256_loadu_pd(r0), c00));
      _mm256_storeu_pd(r0 + 4, _mm256_add_pd(_mm256_loadu_pd(r0 + 4), c01));
      _mm256_storeu_pd(r1, _mm256_add_pd(_mm256_loadu_pd(r1), c10));
      _mm256_storeu_pd(r1 + 4, _mm256_add_pd(_mm256_loadu_pd(r1 + 4), c11));
      _mm256_storeu_pd(r2, _mm256_add_pd(_mm256_loadu_pd(r2), c20));
      _mm256_storeu_pd(r2 + 4, _mm256_add_pd(_mm256_loadu_pd(r2 + 4), c21));
      _mm256_storeu_pd(r3, _mm256_add_pd(_mm256_loadu_pd(r3), c30));
      _mm256_storeu_pd(r3 + 4, _mm256_add_pd(_mm256_loadu_pd(r3 + 4), c31));
    }
  }
};

}  // namespace

void gemm_avx2(bool trans_a, bool trans_b, int m, int n, int k,
               const double* a, int lda, const double* b, int ldb, double* c,
               int ldc, bool accumulate) {
  gemm_driver<MicroAvx2>(trans_a, trans_b, m, n, k, a, lda, b, ldb, c, ldc,
                         accumulate);
}

}  // namespace sonarsynth::kernels::detail
