#include "sonarsynth/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <mutex>
#include <stdexcept>
#include <string>

namespace sonarsynth::kernels {

namespace {

using GemmFn = void (*)(bool, bool, int, int, int, const double*, int,
                        const double*, int, double*, int, bool);

std::atomic<GemmFn> g_gemm{nullptr};
std::atomic<Isa> g_active{Isa::scalar};
std::once_flag g_init_once;

GemmFn fn_for(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return &detail::gemm_scalar;
#if defined(SONARSYNTH_X86)
    case Isa::avx2:
      return &detail::gemm_avx2;
    case Isa::avx512:
      return &detail::gemm_avx512;
#else
    default:
      break;
#endif
  }
  return &detail::gemm_scalar;
}

void init_dispatch() {
  Isa isa = best_supported();
  if (const char* env = std::getenv("SONARSYNTH_ISA")) {
    if (std::strcmp(env, "scalar") == 0) isa = Isa::scalar;
    else if (std::strcmp(env, "avx2") == 0 && supported(Isa::avx2)) isa = Isa::avx2;
    else if (std::strcmp(env, "avx512") == 0 && supported(Isa::avx512)) isa = Isa::avx512;
  }
  g_active.store(isa);
  g_gemm.store(fn_for(isa));
}

void ensure_init() { std::call_once(g_init_once, init_dispatch); }

}  // namespace

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::avx512: return "avx512";
  }
  return "?";
}

bool supported(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
#if defined(SONARSYNTH_X86)
    case Isa::avx2:
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    case Isa::avx512:
      return __builtin_cpu_supports("avx512f");
#endif
    default:
      return false;
  }
}

Isa best_supported() {
  if (supported(Isa::avx512)) return Isa::avx512;
  if (supported(Isa::avx2)) return Isa::avx2;
  return Isa::scalar;
}

Isa active() {
  ensure_init();
  return g_active.load();
}

void force(Isa isa) {
  ensure_init();
  if (!supported(isa)) {
    throw std::runtime_error(std::string("kernels: isa not supported: ") +
                             isa_name(isa));
  }
  g_active.store(isa);
  g_gemm.store(fn_for(isa));
}

void gemm(bool trans_a, bool trans_b, int m, int n, int k, const double* a,
          int lda, const double* b, int ldb, double* c, int ldc,
          bool accumulate) {
  ensure_init();
  g_gemm.load()(trans_a, trans_b, m, n, k, a, lda, b, ldb, c, ldc, accumulate);
}

}  // namespace sonarsynth::kernels
