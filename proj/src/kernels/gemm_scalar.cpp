#include "gemm_driver.hpp"
#include "sonarsynth/kernels.hpp"

namespace sonarsynth::kernels::detail {

namespace {

// Reference microkernel: 4x8 tile, plain loops. Accumulation order over k is
// identical to the SIMD variants' per-element order up to lane association.
struct MicroScalar {
  static constexpr int MR = 4;
  static constexpr int NR = 8;

  static void run(int kk, const double* ap, const double* bp, double* c,
                  int ldc, bool overwrite) {
    double acc[MR * NR] = {0.0};
    for (int p = 0; p < kk; ++p) {
      const double* arow = ap + static_cast<std::size_t>(p) * MR;
      const double* brow = bp + static_cast<std::size_t>(p) * NR;
      for (int r = 0; r < MR; ++r) {
        const double av = arow[r];
        for (int q = 0; q < NR; ++q) acc[r * NR + q] += av * brow[q];
      }
    }
    for (int r = 0; r < MR; ++r) {
      double* crow = c + static_cast<std::size_t>(r) * ldc;
      if (overwrite) {
        for (int q = 0; q < NR; ++q) crow[q] = acc[r * NR + q];
      } else {
        for (int q = 0; q < NR; ++q) crow[q] += acc[r * NR + q];
      }
    }
  }
};

}  // namespace

void gemm_scalar(bool trans_a, bool trans_b, int m, int n, int k,
                 const double* a, int lda, const double* b, int ldb, double* c,
                 int ldc, bool accumulate) {
  gemm_driver<MicroScalar>(trans_a, trans_b, m, n, k, a, lda, b, ldb, c, ldc,
                           accumulate);
}

}  // namespace sonarsynth::kernels::detail
