#pragma once

namespace sonarsynth::kernels {

// Instruction sets a GEMM variant exists for. The scalar kernel is the
// reference implementation; SIMD variants are equivalence-tested against it.
enum class Isa { scalar, avx2, avx512 };

const char* isa_name(Isa isa);

// Best variant supported by this CPU.
Isa best_supported();
bool supported(Isa isa);

// Variant used by gemm(). Defaults to best_supported(); the environment
// variable SONARSYNTH_ISA (scalar|avx2|avx512) overrides it at startup.
Isa active();

// Force a specific variant (tests). Throws std::runtime_error if unsupported.
void force(Isa isa);

// C (m x n, row-major, leading dim ldc) = op(A) * op(B), or += if accumulate.
// op(A) is m x k: A itself if !trans_a, else the k x m array A transposed.
// Deterministic for a fixed variant regardless of thread count: every C
// element is accumulated in a fixed order by exactly one worker.
void gemm(bool trans_a, bool trans_b, int m, int n, int k, const double* a,
          int lda, const double* b, int ldb, double* c, int ldc,
          bool accumulate);

namespace detail {
void gemm_scalar(bool trans_a, bool trans_b, int m, int n, int k,
                 const double* a, int lda, const double* b, int ldb, double* c,
                 int ldc, bool accumulate);
#if defined(SONARSYNTH_X86)
void gemm_avx2(bool trans_a, bool trans_b, int m, int n, int k,
               const double* a, int lda, const double* b, int ldb, double* c,
               int ldc, bool accumulate);
void gemm_avx512(bool trans_a, bool trans_b, int m, int n, int k,
                 const double* a, int lda, const double* b, int ldb, double* c,
                 int ldc, bool accumulate);
#endif
}  // namespace detail

}  // namespace sonarsynth::kernels
