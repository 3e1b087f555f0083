#include <cmath>
#include <random>

#include <doctest.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "xfer/net/batch.hpp"

using namespace xfer;

namespace {

std::vector<net::Vec> random_batch(std::size_t count, std::size_t dim,
                                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<net::Vec> batch(count, net::Vec(dim));
  for (auto& v : batch)
    for (auto& x : v) x = d(rng);
  return batch;
}

const net::SampleLossFn kSquaredLoss = [](std::size_t, std::span<const double> out,
                                          std::span<double> gout) {
  double l = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    l += out[i] * out[i];
    gout[i] = 2.0 * out[i];
  }
  return l;
};

}  // namespace

TEST_CASE("batch_backward matches the serial reference") {
  net::DenseNet n({6, 32, 4}, 21);
  const auto inputs = random_batch(300, 6, 22);

  net::GradientTape serial = n.make_tape();
  const double loss_serial = net::batch_backward_reference(n, inputs, kSquaredLoss, serial);
  net::GradientTape parallel = n.make_tape();
  const double loss_parallel = net::batch_backward(n, inputs, kSquaredLoss, parallel);

  CHECK(std::abs(loss_serial - loss_parallel) <=
        1e-12 * std::max(1.0, std::abs(loss_serial)));
  for (std::size_t l = 0; l < serial.weight_grads.size(); ++l) {
    for (std::size_t i = 0; i < serial.weight_grads[l].data.size(); ++i) {
      const double a = serial.weight_grads[l].data[i];
      const double b = parallel.weight_grads[l].data[i];
      CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
    }
  }
}

TEST_CASE("batch_backward is bit-identical across thread counts") {
  net::DenseNet n({5, 24, 3}, 31);
  const auto inputs = random_batch(400, 5, 32);

  auto run = [&](int threads) {
#ifdef _OPENMP
    omp_set_num_threads(threads);
#else
    (void)threads;
#endif
    net::GradientTape tape = n.make_tape();
    const double loss = net::batch_backward(n, inputs, kSquaredLoss, tape);
    return std::make_pair(loss, tape);
  };
  const auto [l1, t1] = run(1);
  const auto [l2, t2] = run(2);
  const auto [l4, t4] = run(4);
#ifdef _OPENMP
  omp_set_num_threads(omp_get_num_procs());
#endif

  CHECK(l1 == l2);
  CHECK(l1 == l4);
  for (std::size_t l = 0; l < t1.weight_grads.size(); ++l) {
    CHECK(t1.weight_grads[l].data == t2.weight_grads[l].data);
    CHECK(t1.weight_grads[l].data == t4.weight_grads[l].data);
    CHECK(t1.bias_grads[l] == t2.bias_grads[l]);
    CHECK(t1.bias_grads[l] == t4.bias_grads[l]);
  }
}

TEST_CASE("batch_forward matches the serial reference exactly") {
  net::DenseNet n({7, 16, 16, 2}, 41);
  const auto inputs = random_batch(150, 7, 43);
  std::vector<net::Vec> a, b;
  net::batch_forward(n, inputs, a);
  net::batch_forward_reference(n, inputs, b);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("small batches fall back to one chunk and still agree") {
  net::DenseNet n({4, 8, 2}, 51);
  const auto inputs = random_batch(9, 4, 52);
  net::GradientTape serial = n.make_tape();
  net::GradientTape parallel = n.make_tape();
  const double ls = net::batch_backward_reference(n, inputs, kSquaredLoss, serial);
  const double lp = net::batch_backward(n, inputs, kSquaredLoss, parallel);
  CHECK(ls == lp);
  for (std::size_t l = 0; l < serial.weight_grads.size(); ++l)
    CHECK(serial.weight_grads[l].data == parallel.weight_grads[l].data);
}
