#include <stdexcept>
#include <random>

#include <doctest.h>

#include "xfer/rnd.hpp"

using namespace xfer;

namespace {

rnd::RndConfig small_config() {
  rnd::RndConfig c;
  c.hidden = 32;
  c.rnd_size = 16;
  return c;
}

net::Vec random_state(int dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  net::Vec v(dim);
  for (auto& x : v) x = d(rng);
  return v;
}

}  // namespace

TEST_CASE("uncertainty: zero when predictor equals target") {
  rnd::RndPair pair(4, small_config(), 17);
  rnd::RndPair copy = pair;
  copy.load_nets(pair.target(), pair.target());
  std::mt19937_64 rng(1);
  for (int i = 0; i < 10; ++i) {
    CHECK(copy.uncertainty(random_state(4, rng)) == 0.0);
  }
}

TEST_CASE("uncertainty: non-negative and deterministic") {
  rnd::RndPair pair(6, small_config(), 18);
  std::mt19937_64 rng(2);
  const net::Vec s = random_state(6, rng);
  const double u1 = pair.uncertainty(s);
  const double u2 = pair.uncertainty(s);
  CHECK(u1 >= 0.0);
  CHECK(u1 == u2);
}

TEST_CASE("update: training on a state lowers its uncertainty") {
  rnd::RndPair pair(5, small_config(), 19);
  std::mt19937_64 rng(3);
  const net::Vec s = random_state(5, rng);
  const double before = pair.uncertainty(s);
  const std::vector<net::Vec> batch{s};
  for (int i = 0; i < 200; ++i) pair.update(batch);
  CHECK(pair.uncertainty(s) < before);
}

TEST_CASE("update: loss sequence is non-increasing after warmup") {
  int good = 0;
  const int trials = 20;
  for (int t = 0; t < trials; ++t) {
    rnd::RndPair pair(5, small_config(), 100 + t);
    std::mt19937_64 rng(200 + t);
    const std::vector<net::Vec> batch{random_state(5, rng)};
    std::vector<double> losses;
    for (int i = 0; i < 200; ++i) losses.push_back(pair.update(batch));
    bool monotone = true;
    for (std::size_t i = 11; i < losses.size(); ++i)
      if (losses[i] > losses[i - 1]) monotone = false;
    if (monotone) ++good;
  }
  CHECK(good >= trials * 95 / 100);
}

TEST_CASE("update: target parameters are bit-identical before and after") {
  rnd::RndPair pair(4, small_config(), 20);
  const net::DenseNet target_before = pair.target();
  std::mt19937_64 rng(4);
  std::vector<net::Vec> batch;
  for (int i = 0; i < 32; ++i) batch.push_back(random_state(4, rng));
  for (int i = 0; i < 50; ++i) pair.update(batch);
  for (std::size_t l = 0; l < target_before.weights().size(); ++l) {
    CHECK(pair.target().weights()[l].data == target_before.weights()[l].data);
    CHECK(pair.target().biases()[l] == target_before.biases()[l]);
  }
}

TEST_CASE("update: empty batch is an error") {
  rnd::RndPair pair(3, small_config(), 21);
  CHECK_THROWS_AS(pair.update({}), std::invalid_argument);
}

TEST_CASE("update: training on one state moves distant states less") {
  // Locality smoke test: u(A) should drop by more than u(B) changes when
  // B is a distant random state.
  int good = 0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    rnd::RndPair pair(8, small_config(), 300 + t);
    std::mt19937_64 rng(400 + t);
    net::Vec a = random_state(8, rng);
    net::Vec b = random_state(8, rng);
    for (auto& x : a) x += 3.0;   // push the two states apart
    for (auto& x : b) x -= 3.0;
    const double ua0 = pair.uncertainty(a);
    const double ub0 = pair.uncertainty(b);
    const std::vector<net::Vec> batch{a};
    for (int i = 0; i < 50; ++i) pair.update(batch);
    const double da = std::abs(pair.uncertainty(a) - ua0);
    const double db = std::abs(pair.uncertainty(b) - ub0);
    if (db < da) ++good;
  }
  CHECK(good >= 80);
}
