#include <cmath>
#include <random>

#include <doctest.h>

#include "xfer/net/adam.hpp"
#include "xfer/net/dense_net.hpp"
#include "xfer/net/serialize.hpp"

using namespace xfer;

namespace {

// Straightforward layer-by-layer oracle, written independently of the
// DenseNet forward pass.
net::Vec oracle_forward(const net::DenseNet& n, const net::Vec& input) {
  net::Vec a = input;
  const auto& ws = n.weights();
  const auto& bs = n.biases();
  for (std::size_t l = 0; l < ws.size(); ++l) {
    net::Vec next(ws[l].rows, 0.0);
    for (int r = 0; r < ws[l].rows; ++r) {
      double s = bs[l][r];
      for (int c = 0; c < ws[l].cols; ++c) s += ws[l].at(r, c) * a[c];
      next[r] = s;
    }
    if (l + 1 < ws.size())
      for (auto& v : next) v = std::tanh(v);
    a = std::move(next);
  }
  return a;
}

net::Vec random_vec(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  net::Vec v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

double loss_for(net::DenseNet& n, const net::Vec& input, const net::Vec& coeff) {
  const net::Vec& out = n.forward(input);
  double l = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) l += coeff[i] * out[i];
  return l;
}

}  // namespace

TEST_CASE("forward: identity linear layer") {
  net::DenseNet n({2, 2}, 1);
  n.weights()[0].at(0, 0) = 1.0;
  n.weights()[0].at(0, 1) = 0.0;
  n.weights()[0].at(1, 0) = 0.0;
  n.weights()[0].at(1, 1) = 1.0;
  n.biases()[0] = {0.0, 0.0};
  const net::Vec out = n.forward(std::vector<double>{1.0, 2.0});
  CHECK(out[0] == doctest::Approx(1.0));
  CHECK(out[1] == doctest::Approx(2.0));
}

TEST_CASE("forward: zero input with zero biases stays zero through tanh") {
  net::DenseNet n({3, 8, 8, 2}, 2);
  for (auto& b : n.biases()) std::fill(b.begin(), b.end(), 0.0);
  const net::Vec out = n.forward(net::Vec(3, 0.0));
  for (double v : out) CHECK(v == 0.0);
}

TEST_CASE("forward: random 3-4-2 net matches the matrix oracle to 1e-10") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    net::DenseNet n({3, 4, 2}, 100 + trial);
    const net::Vec x = random_vec(3, rng);
    const net::Vec got = n.forward(x);
    const net::Vec want = oracle_forward(n, x);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i)
      CHECK(std::abs(got[i] - want[i]) < 1e-10);
  }
}

TEST_CASE("forward: dimension mismatch is a contract violation") {
  net::DenseNet n({3, 2}, 3);
  CHECK_THROWS_AS(n.forward(net::Vec(4, 0.0)), std::invalid_argument);
}

TEST_CASE("backward: linear layer gradient of output[0] is the input") {
  net::DenseNet n({3, 2}, 4);
  const net::Vec x{0.5, -1.5, 2.0};
  n.forward(x);
  net::GradientTape tape = n.make_tape();
  n.backward(std::vector<double>{1.0, 0.0}, tape);
  for (int j = 0; j < 3; ++j) {
    CHECK(tape.weight_grads[0].at(0, j) == doctest::Approx(x[j]));
    CHECK(tape.weight_grads[0].at(1, j) == 0.0);
  }
  CHECK(tape.bias_grads[0][0] == doctest::Approx(1.0));
  CHECK(tape.bias_grads[0][1] == 0.0);
}

TEST_CASE("backward: zero upstream gradient gives an all-zero tape") {
  net::DenseNet n({4, 6, 3}, 5);
  std::mt19937_64 rng(7);
  n.forward(random_vec(4, rng));
  net::GradientTape tape = n.make_tape();
  n.backward(net::Vec(3, 0.0), tape);
  for (const auto& m : tape.weight_grads)
    for (double v : m.data) CHECK(v == 0.0);
  for (const auto& b : tape.bias_grads)
    for (double v : b) CHECK(v == 0.0);
}

TEST_CASE("backward before forward is a contract violation") {
  net::DenseNet n({2, 2}, 6);
  net::GradientTape tape = n.make_tape();
  CHECK_THROWS_AS(n.backward(std::vector<double>{1.0, 0.0}, tape), std::logic_error);
}

TEST_CASE("backward: 4-8-3 analytic gradients match central finite differences") {
  std::mt19937_64 rng(11);
  net::DenseNet n({4, 8, 3}, 77);
  const net::Vec x = random_vec(4, rng);
  const net::Vec coeff = random_vec(3, rng);

  n.forward(x);
  net::GradientTape tape = n.make_tape();
  n.backward(coeff, tape);

  const double h = 1e-5;
  auto check = [&](double& param, double analytic) {
    const double saved = param;
    param = saved + h;
    const double up = loss_for(n, x, coeff);
    param = saved - h;
    const double down = loss_for(n, x, coeff);
    param = saved;
    const double fd = (up - down) / (2.0 * h);
    const double rel = std::abs(analytic - fd) / std::max(std::abs(fd), 1e-6);
    CHECK(rel < 1e-4);
  };
  for (std::size_t l = 0; l < n.weights().size(); ++l) {
    for (std::size_t i = 0; i < n.weights()[l].data.size(); ++i)
      check(n.weights()[l].data[i], tape.weight_grads[l].data[i]);
    for (std::size_t i = 0; i < n.biases()[l].size(); ++i)
      check(n.biases()[l][i], tape.bias_grads[l][i]);
  }
}

TEST_CASE("adam: zero tape leaves fresh parameters unchanged") {
  net::DenseNet n({3, 4, 2}, 8);
  const net::DenseNet before = n;
  net::AdamState s = net::AdamState::for_net(n, 0.01);
  net::GradientTape tape = n.make_tape();
  net::adam_step(n, tape, s);
  CHECK(s.step == 1);
  for (std::size_t l = 0; l < n.weights().size(); ++l)
    CHECK(n.weights()[l].data == before.weights()[l].data);
}

TEST_CASE("adam: minimizes (theta-3)^2 to within 1e-3 in 500 steps") {
  net::DenseNet n({1, 1}, 9);
  n.weights()[0].at(0, 0) = 0.0;
  net::AdamState s = net::AdamState::for_net(n, 0.1);
  for (int i = 0; i < 500; ++i) {
    net::GradientTape tape = n.make_tape();
    const double theta = n.weights()[0].at(0, 0);
    tape.weight_grads[0].at(0, 0) = 2.0 * (theta - 3.0);
    net::adam_step(n, tape, s);
  }
  CHECK(std::abs(n.weights()[0].at(0, 0) - 3.0) < 1e-3);
}

TEST_CASE("adam: identical calls from identical state are deterministic") {
  auto run = [] {
    net::DenseNet n({3, 5, 2}, 10);
    net::AdamState s = net::AdamState::for_net(n, 0.01);
    std::mt19937_64 rng(3);
    for (int step = 0; step < 5; ++step) {
      const net::Vec x = random_vec(3, rng);
      n.forward(x);
      net::GradientTape tape = n.make_tape();
      n.backward(std::vector<double>{1.0, -1.0}, tape);
      net::adam_step(n, tape, s);
    }
    return n;
  };
  const net::DenseNet a = run();
  const net::DenseNet b = run();
  for (std::size_t l = 0; l < a.weights().size(); ++l) {
    CHECK(a.weights()[l].data == b.weights()[l].data);
    CHECK(a.biases()[l] == b.biases()[l]);
  }
}

TEST_CASE("adam: non-finite gradients are rejected, parameters untouched") {
  net::DenseNet n({2, 2}, 11);
  const net::DenseNet before = n;
  net::AdamState s = net::AdamState::for_net(n, 0.01);
  net::GradientTape tape = n.make_tape();
  tape.weight_grads[0].at(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(net::adam_step(n, tape, s), std::runtime_error);
  CHECK(n.weights()[0].data == before.weights()[0].data);
  CHECK(s.step == 0);
}

TEST_CASE("init: identical seeds give bit-identical parameters") {
  net::DenseNet a({5, 7, 3}, 1234);
  net::DenseNet b({5, 7, 3}, 1234);
  net::DenseNet c({5, 7, 3}, 1235);
  CHECK(a.weights()[0].data == b.weights()[0].data);
  CHECK(a.weights()[1].data == b.weights()[1].data);
  CHECK(a.weights()[0].data != c.weights()[0].data);
}

TEST_CASE("parameters stay finite over random bounded updates") {
  net::DenseNet n({6, 16, 4}, 12);
  net::AdamState s = net::AdamState::for_net(n, 0.01);
  std::mt19937_64 rng(13);
  for (int step = 0; step < 200; ++step) {
    const net::Vec x = random_vec(6, rng);
    n.forward(x);
    net::GradientTape tape = n.make_tape();
    n.backward(random_vec(4, rng), tape);
    net::adam_step(n, tape, s);
  }
  CHECK(n.parameters_finite());
}

TEST_CASE("serialization: JSON snapshot round-trips bit-exactly") {
  net::DenseNet n({4, 9, 2}, 99);
  const std::string path = "test_net_snapshot.json";
  net::save_net(n, path);
  const net::DenseNet back = net::load_net(path);
  REQUIRE(back.layer_sizes() == n.layer_sizes());
  for (std::size_t l = 0; l < n.weights().size(); ++l) {
    CHECK(back.weights()[l].data == n.weights()[l].data);
    CHECK(back.biases()[l] == n.biases()[l]);
  }
  std::remove(path.c_str());
}
