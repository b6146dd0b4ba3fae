#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "sonarsynth/kernels.hpp"
#include "sonarsynth/rng.hpp"

using namespace sonarsynth;

namespace {

// Independent reference: plain triple loop, no blocking.
void gemm_naive(bool ta, bool tb, int m, int n, int k, const double* a,
                int lda, const double* b, int ldb, double* c, int ldc,
                bool acc) {
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      double s = acc ? c[static_cast<std::size_t>(i) * ldc + j] : 0.0;
      for (int p = 0; p < k; ++p) {
        const double av = ta ? a[static_cast<std::size_t>(p) * lda + i]
                             : a[static_cast<std::size_t>(i) * lda + p];
        const double bv = tb ? b[static_cast<std::size_t>(j) * ldb + p]
                             : b[static_cast<std::size_t>(p) * ldb + j];
        s += av * bv;
      }
      c[static_cast<std::size_t>(i) * ldc + j] = s;
    }
  }
}

double max_rel_err(const std::vector<double>& got,
                   const std::vector<double>& want) {
  double worst = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    const double scale = std::max(1.0, std::abs(want[i]));
    worst = std::max(worst, std::abs(got[i] - want[i]) / scale);
  }
  return worst;
}

struct Case {
  int m, n, k;
  bool ta, tb, acc;
};

void check_isa(kernels::Isa isa) {
  if (!kernels::supported(isa)) return;
  kernels::force(isa);
  Rng rng(42);
  const Case cases[] = {
      {1, 1, 1, false, false, false},   {3, 5, 7, false, false, false},
      {4, 8, 16, false, false, true},   {17, 23, 31, false, false, false},
      {17, 23, 31, true, false, false}, {17, 23, 31, false, true, false},
      {17, 23, 31, true, true, true},   {64, 64, 64, false, false, false},
      {256, 256, 130, false, true, false},
      {130, 520, 333, true, false, true},
      {5, 600, 2, false, false, false},
  };
  for (const auto& cs : cases) {
    CAPTURE(cs.m);
    CAPTURE(cs.n);
    CAPTURE(cs.k);
    const int lda = cs.ta ? cs.m : cs.k;
    const int ldb = cs.tb ? cs.k : cs.n;
    std::vector<double> a(static_cast<std::size_t>(cs.ta ? cs.k : cs.m) * lda);
    std::vector<double> b(static_cast<std::size_t>(cs.tb ? cs.n : cs.k) * ldb);
    std::vector<double> c0(static_cast<std::size_t>(cs.m) * cs.n);
    for (auto& v : a) v = rng.uniform(-1, 1);
    for (auto& v : b) v = rng.uniform(-1, 1);
    for (auto& v : c0) v = rng.uniform(-1, 1);
    std::vector<double> got = c0, want = c0;
    kernels::gemm(cs.ta, cs.tb, cs.m, cs.n, cs.k, a.data(), lda, b.data(), ldb,
                  got.data(), cs.n, cs.acc);
    gemm_naive(cs.ta, cs.tb, cs.m, cs.n, cs.k, a.data(), lda, b.data(), ldb,
               want.data(), cs.n, cs.acc);
    CHECK(max_rel_err(got, want) < 1e-12);
  }
  kernels::force(kernels::best_supported());
}

}  // namespace

TEST_CASE("scalar kernel matches naive reference") {
  check_isa(kernels::Isa::scalar);
}

TEST_CASE("avx2 kernel matches naive reference") {
  check_isa(kernels::Isa::avx2);
}

TEST_CASE("avx512 kernel matches naive reference") {
  check_isa(kernels::Isa::avx512);
}

TEST_CASE("simd variants agree with the scalar kernel") {
  Rng rng(9);
  const int m = 96, n = 200, k = 513;
  std::vector<double> a(static_cast<std::size_t>(m) * k);
  std::vector<double> b(static_cast<std::size_t>(k) * n);
  for (auto& v : a) v = rng.uniform(-1, 1);
  for (auto& v : b) v = rng.uniform(-1, 1);

  kernels::force(kernels::Isa::scalar);
  std::vector<double> ref(static_cast<std::size_t>(m) * n);
  kernels::gemm(false, false, m, n, k, a.data(), k, b.data(), n, ref.data(), n,
                false);

  for (auto isa : {kernels::Isa::avx2, kernels::Isa::avx512}) {
    if (!kernels::supported(isa)) continue;
    kernels::force(isa);
    std::vector<double> out(static_cast<std::size_t>(m) * n);
    kernels::gemm(false, false, m, n, k, a.data(), k, b.data(), n, out.data(),
                  n, false);
    CHECK(max_rel_err(out, ref) < 1e-12);
  }
  kernels::force(kernels::best_supported());
}

TEST_CASE("gemm is bitwise reproducible across calls") {
  Rng rng(11);
  const int m = 70, n = 66, k = 129;
  std::vector<double> a(static_cast<std::size_t>(m) * k);
  std::vector<double> b(static_cast<std::size_t>(k) * n);
  for (auto& v : a) v = rng.uniform(-1, 1);
  for (auto& v : b) v = rng.uniform(-1, 1);
  std::vector<double> c1(static_cast<std::size_t>(m) * n);
  std::vector<double> c2(static_cast<std::size_t>(m) * n);
  kernels::gemm(false, false, m, n, k, a.data(), k, b.data(), n, c1.data(), n,
                false);
  kernels::gemm(false, false, m, n, k, a.data(), k, b.data(), n, c2.data(), n,
                false);
  CHECK(c1 == c2);
}
