// Compares the serial reference batch kernels against the OpenMP versions
// on the three net shapes the experiments actually run (predator-prey
// policy, MoD policy, RND pair).

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "xfer/net/batch.hpp"

using namespace xfer;

namespace {

double run_once(const net::DenseNet& n, const std::vector<net::Vec>& inputs,
                bool parallel, double* checksum) {
  net::GradientTape tape = n.make_tape();
  const net::SampleLossFn loss = [](std::size_t, std::span<const double> out,
                                    std::span<double> gout) {
    double l = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
      l += out[i] * out[i];
      gout[i] = 2.0 * out[i];
    }
    return l;
  };
  const auto t0 = std::chrono::steady_clock::now();
  const double total = parallel ? net::batch_backward(n, inputs, loss, tape)
                                : net::batch_backward_reference(n, inputs, loss, tape);
  const auto t1 = std::chrono::steady_clock::now();
  *checksum = total;
  return std::chrono::duration<double>(t1 - t0).count();
}

void bench_shape(const char* name, const std::vector<int>& sizes, std::size_t batch,
                 int repeats) {
  net::DenseNet n(sizes, 42);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<net::Vec> inputs(batch, net::Vec(sizes.front()));
  for (auto& v : inputs)
    for (auto& x : v) x = dist(rng);

  double serial = 1e300, parallel = 1e300;
  double cs_serial = 0.0, cs_parallel = 0.0;
  for (int r = 0; r < repeats; ++r) {
    serial = std::min(serial, run_once(n, inputs, false, &cs_serial));
    parallel = std::min(parallel, run_once(n, inputs, true, &cs_parallel));
  }
  std::printf("%-16s batch %5zu | serial %8.2f ms | omp %8.2f ms | speedup %5.2fx | "
              "rel-diff %.2e\n",
              name, batch, serial * 1e3, parallel * 1e3, serial / parallel,
              std::abs(cs_serial - cs_parallel) / std::max(1.0, std::abs(cs_serial)));
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP; both paths run serially\n");
#endif
  bench_shape("pp-policy", {27, 64, 5}, 500, 5);
  bench_shape("mod-policy", {30, 128, 128, 128, 128, 5}, 320, 5);
  bench_shape("rnd-1024", {27, 256, 1024}, 500, 3);
  return 0;
}
