// Quick GEMM throughput check for the shapes the conv layers produce.

#include <chrono>
#include <cstdio>
#include <vector>

#include "sonarsynth/kernels.hpp"
#include "sonarsynth/rng.hpp"

using namespace sonarsynth;

static void bench(int m, int n, int k, int reps) {
  Rng rng(7);
  std::vector<double> a(static_cast<std::size_t>(m) * k);
  std::vector<double> b(static_cast<std::size_t>(k) * n);
  std::vector<double> c(static_cast<std::size_t>(m) * n);
  for (auto& v : a) v = rng.uniform(-1, 1);
  for (auto& v : b) v = rng.uniform(-1, 1);

  kernels::gemm(false, false, m, n, k, a.data(), k, b.data(), n, c.data(), n,
                false);  // warm up
  const auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) {
    kernels::gemm(false, false, m, n, k, a.data(), k, b.data(), n, c.data(), n,
                  false);
  }
  const auto t1 = std::chrono::steady_clock::now();
  const double sec = std::chrono::duration<double>(t1 - t0).count();
  const double flops = 2.0 * m * n * k * reps;
  std::printf("%5dx%5dx%5d  %8.2f GFLOP/s  (%.1f ms/call)\n", m, n, k,
              flops / sec * 1e-9, sec / reps * 1e3);
}

int main() {
  std::printf("isa: %s\n", kernels::isa_name(kernels::active()));
  bench(256, 256, 2304, 50);   // conv fwd (bank 3x3 at 16x16)
  bench(256, 2304, 256, 50);   // conv dW
  bench(2304, 256, 256, 50);   // conv dX
  bench(128, 256, 1152, 50);
  bench(32, 256, 27, 200);
  return 0;
}
