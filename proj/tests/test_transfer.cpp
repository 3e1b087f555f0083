#include <stdexcept>
#include <algorithm>
#include <random>
#include <set>

#include <doctest.h>

#include "xfer/transfer.hpp"

using namespace xfer;

namespace {

transfer::Transition make_transition(double u, int action = 0) {
  transfer::Transition t;
  t.state = {u, 0.0};
  t.action = action;
  t.reward = 0.0;
  t.next_state = {0.0, 0.0};
  t.done = false;
  t.uncertainty = u;
  return t;
}

transfer::TransferBuffer buffer_with(const std::vector<double>& us) {
  transfer::TransferBuffer b(2, 3, 1.0);
  for (double u : us) b.record(0, 1, make_transition(u));
  return b;
}

}  // namespace

TEST_CASE("capture window boundaries") {
  // 20% of 3000 episodes: 2399 is outside, 2400 is the first captured one.
  CHECK_FALSE(transfer::TransferBuffer::in_capture_window(2399, 3000, 0.2));
  CHECK(transfer::TransferBuffer::in_capture_window(2400, 3000, 0.2));
  CHECK(transfer::TransferBuffer::in_capture_window(2999, 3000, 0.2));

  for (long ep : {0L, 1L, 999L})
    CHECK(transfer::TransferBuffer::in_capture_window(ep, 1000, 1.0));
  for (long ep : {0L, 500L, 999L})
    CHECK_FALSE(transfer::TransferBuffer::in_capture_window(ep, 1000, 0.0));
}

TEST_CASE("record appends only inside the window") {
  transfer::TransferBuffer b(2, 3, 0.2);
  b.record(2399, 3000, make_transition(0.1));
  CHECK(b.size() == 0);
  b.record(2400, 3000, make_transition(0.1));
  CHECK(b.size() == 1);
}

TEST_CASE("resolve_threshold: fixed, mean, median") {
  const auto b = buffer_with({1.0, 2.0, 9.0});
  CHECK(transfer::resolve_threshold(b, transfer::ThresholdSpec::fixed(0.02)) ==
        doctest::Approx(0.02));
  CHECK(transfer::resolve_threshold(b, transfer::ThresholdSpec::mean()) ==
        doctest::Approx(4.0));
  CHECK(transfer::resolve_threshold(b, transfer::ThresholdSpec::median()) ==
        doctest::Approx(2.0));

  const auto even = buffer_with({4.0, 1.0, 3.0, 2.0});
  CHECK(transfer::resolve_threshold(even, transfer::ThresholdSpec::median()) ==
        doctest::Approx(2.5));

  const transfer::TransferBuffer empty(2, 3, 1.0);
  CHECK_THROWS_AS(transfer::resolve_threshold(empty, transfer::ThresholdSpec::mean()),
                  std::runtime_error);
  CHECK(transfer::resolve_threshold(empty, transfer::ThresholdSpec::fixed(0.5)) == 0.5);
}

TEST_CASE("threshold spec parsing") {
  CHECK(transfer::ThresholdSpec::parse("mean").kind ==
        transfer::ThresholdSpec::Kind::mean);
  CHECK(transfer::ThresholdSpec::parse("median").kind ==
        transfer::ThresholdSpec::Kind::median);
  const auto fixed = transfer::ThresholdSpec::parse("0.015");
  CHECK(fixed.kind == transfer::ThresholdSpec::Kind::fixed);
  CHECK(fixed.value == doctest::Approx(0.015));
  CHECK_THROWS_AS(transfer::ThresholdSpec::parse("bogus"), std::invalid_argument);
  CHECK_THROWS_AS(transfer::ThresholdSpec::parse("-1"), std::invalid_argument);
}

TEST_CASE("filter_and_sample: strict threshold") {
  const auto b = buffer_with({0.1, 0.5, 0.9});
  std::mt19937_64 rng(1);
  const auto batch = transfer::filter_and_sample(b, 0.5, 10, rng);
  REQUIRE(batch.size() == 1);
  CHECK(batch[0].uncertainty == doctest::Approx(0.1));
}

TEST_CASE("filter_and_sample: zero budget gives an empty batch") {
  const auto b = buffer_with({0.1, 0.2});
  std::mt19937_64 rng(2);
  CHECK(transfer::filter_and_sample(b, 1.0, 0, rng).empty());
}

TEST_CASE("filter_and_sample: samples without replacement") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  std::vector<double> us(500);
  for (auto& u : us) u = d(gen);
  // Tag each transition by its uncertainty so duplicates are detectable.
  const auto b = buffer_with(us);
  std::mt19937_64 rng(4);
  const auto batch = transfer::filter_and_sample(b, 0.6, 100, rng);
  CHECK(batch.size() == 100);
  std::set<double> seen;
  for (const auto& t : batch) {
    CHECK(t.uncertainty < 0.6);
    seen.insert(t.uncertainty);
  }
  CHECK(seen.size() == batch.size());
}

TEST_CASE("filter_and_sample: monotone eligibility in the threshold") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  std::vector<double> us(300);
  for (auto& u : us) u = d(gen);
  const auto b = buffer_with(us);
  std::size_t previous = 0;
  for (double t : {0.1, 0.3, 0.5, 0.7, 0.9, 1.1}) {
    std::mt19937_64 rng(6);
    const auto batch = transfer::filter_and_sample(b, t, 1000, rng);
    CHECK(batch.size() >= previous);
    previous = batch.size();
  }
}

TEST_CASE("filter_and_sample: fixed seed gives an identical batch") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  std::vector<double> us(200);
  for (auto& u : us) u = d(gen);
  const auto b = buffer_with(us);
  std::mt19937_64 r1(8), r2(8);
  const auto b1 = transfer::filter_and_sample(b, 0.5, 50, r1);
  const auto b2 = transfer::filter_and_sample(b, 0.5, 50, r2);
  REQUIRE(b1.size() == b2.size());
  for (std::size_t i = 0; i < b1.size(); ++i)
    CHECK(b1[i].uncertainty == b2[i].uncertainty);
}

TEST_CASE("pretrain: zero epochs leaves the agent untouched") {
  ppo::PpoAgent agent(2, 3, {4}, {}, 30);
  const net::DenseNet before = agent.policy();
  std::vector<transfer::Transition> batch{make_transition(0.1, 1)};
  transfer::pretrain(agent, batch, 0);
  for (std::size_t l = 0; l < before.weights().size(); ++l)
    CHECK(agent.policy().weights()[l].data == before.weights()[l].data);
}

TEST_CASE("pretrain: empty batch degrades to a no-op") {
  ppo::PpoAgent agent(2, 3, {4}, {}, 31);
  const net::DenseNet before = agent.policy();
  const auto stats = transfer::pretrain(agent, {}, 10);
  CHECK(stats.batch_size == 0);
  for (std::size_t l = 0; l < before.weights().size(); ++l)
    CHECK(agent.policy().weights()[l].data == before.weights()[l].data);
}

TEST_CASE("pretrain: batches favoring one action raise its probability") {
  ppo::PpoConfig cfg;
  cfg.learning_rate = 0.01;
  ppo::PpoAgent agent(1, 3, {8}, cfg, 32);
  const net::Vec state{1.0};
  const double before = ppo::softmax(agent.policy().evaluate(state))[2];

  std::vector<transfer::Transition> batch;
  for (int i = 0; i < 64; ++i) {
    transfer::Transition t;
    t.state = state;
    t.action = 2;
    t.reward = 1.0;
    t.next_state = state;
    t.done = true;
    t.uncertainty = 0.01;
    batch.push_back(t);
  }
  transfer::pretrain(agent, batch, 10);
  const double after = ppo::softmax(agent.policy().evaluate(state))[2];
  CHECK(after > before);
}

TEST_CASE("buffer files: binary round-trip is exact") {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  transfer::TransferBuffer b(3, 4, 0.4);
  for (int i = 0; i < 50; ++i) {
    transfer::Transition t;
    t.state = {d(gen), d(gen), d(gen)};
    t.action = i % 4;
    t.reward = d(gen);
    t.next_state = {d(gen), d(gen), d(gen)};
    t.done = (i % 7) == 0;
    t.uncertainty = std::abs(d(gen));
    b.record(0, 1, std::move(t));
  }
  const std::string path = "test_buffer.bin";
  transfer::save_buffer(b, path);
  const auto back = transfer::load_buffer(path);
  REQUIRE(back.size() == b.size());
  CHECK(back.state_dim() == 3);
  CHECK(back.action_count() == 4);
  CHECK(back.capture_window() == 0.4);
  for (std::size_t i = 0; i < b.size(); ++i) {
    const auto& x = b.transitions()[i];
    const auto& y = back.transitions()[i];
    CHECK(x.state == y.state);
    CHECK(x.action == y.action);
    CHECK(x.reward == y.reward);
    CHECK(x.next_state == y.next_state);
    CHECK(x.done == y.done);
    CHECK(x.uncertainty == y.uncertainty);
  }
  std::remove(path.c_str());
}

TEST_CASE("buffer files: JSONL round-trip is exact") {
  transfer::TransferBuffer b(2, 2, 0.2);
  for (int i = 0; i < 10; ++i) {
    auto t = make_transition(0.125 * i, i % 2);
    t.reward = -0.01 * i;
    b.record(0, 1, std::move(t));
  }
  const std::string path = "test_buffer.jsonl";
  transfer::save_buffer_jsonl(b, path);
  const auto back = transfer::load_buffer_jsonl(path);
  REQUIRE(back.size() == b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    CHECK(back.transitions()[i].uncertainty == b.transitions()[i].uncertainty);
    CHECK(back.transitions()[i].reward == b.transitions()[i].reward);
    CHECK(back.transitions()[i].state == b.transitions()[i].state);
  }
  std::remove(path.c_str());
}
