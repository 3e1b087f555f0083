#include "xfer/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace xfer::transfer {

ThresholdSpec ThresholdSpec::parse(const std::string& text) {
  if (text == "mean") return mean();
  if (text == "median") return median();
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    if (v < 0.0) throw std::invalid_argument(text);
    return fixed(v);
  } catch (const std::exception&) {
    throw std::invalid_argument("threshold: expected 'mean', 'median' or a "
                                "non-negative number, got '" + text + "'");
  }
}

std::string ThresholdSpec::describe() const {
  switch (kind) {
    case Kind::mean: return "mean";
    case Kind::median: return "median";
    case Kind::fixed: break;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", value);
  return buf;
}

TransferBuffer::TransferBuffer(int state_dim, int action_count, double capture_window)
    : state_dim_(state_dim), action_count_(action_count), capture_window_(capture_window) {
  if (capture_window < 0.0 || capture_window > 1.0)
    throw std::invalid_argument("TransferBuffer: capture window must be in [0,1]");
}

bool TransferBuffer::in_capture_window(long episode_index, long total_episodes,
                                       double capture_window) {
  const long captured = std::lround(capture_window * static_cast<double>(total_episodes));
  return episode_index >= total_episodes - captured;
}

void TransferBuffer::record(long episode_index, long total_episodes, Transition t) {
  if (!in_capture_window(episode_index, total_episodes, capture_window_)) return;
  transitions_.push_back(std::move(t));
}

double resolve_threshold(const TransferBuffer& buffer, const ThresholdSpec& spec) {
  if (spec.kind == ThresholdSpec::Kind::fixed) return spec.value;
  if (buffer.empty())
    throw std::runtime_error("resolve_threshold: buffer empty, cannot compute " +
                             spec.describe());
  std::vector<double> us;
  us.reserve(buffer.size());
  for (const auto& t : buffer.transitions()) us.push_back(t.uncertainty);
  if (spec.kind == ThresholdSpec::Kind::mean) {
    double sum = 0.0;
    for (double u : us) sum += u;
    return sum / static_cast<double>(us.size());
  }
  std::sort(us.begin(), us.end());
  const std::size_t n = us.size();
  if (n % 2 == 1) return us[n / 2];
  return 0.5 * (us[n / 2 - 1] + us[n / 2]);
}

std::vector<Transition> filter_and_sample(const TransferBuffer& buffer, double threshold,
                                          long budget, std::mt19937_64& rng) {
  if (budget < 0) throw std::invalid_argument("filter_and_sample: negative budget");
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < buffer.size(); ++i)
    if (buffer.transitions()[i].uncertainty < threshold) eligible.push_back(i);

  const std::size_t want = static_cast<std::size_t>(budget);
  const std::size_t take = std::min(want, eligible.size());
  if (take < want) {
    std::fprintf(stderr,
                 "[transfer] warning: only %zu of %zu requested transitions "
                 "satisfy u < %g\n",
                 eligible.size(), want, threshold);
  }

  // Partial Fisher-Yates: the first `take` entries are a uniform sample
  // without replacement, already in randomized order.
  for (std::size_t i = 0; i < take; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, eligible.size() - 1);
    std::swap(eligible[i], eligible[pick(rng)]);
  }
  std::vector<Transition> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i)
    out.push_back(buffer.transitions()[eligible[i]]);
  return out;
}

ppo::UpdateStats pretrain(ppo::PpoAgent& agent, std::span<const Transition> batch,
                          int epochs) {
  if (batch.empty()) {
    std::fprintf(stderr, "[transfer] warning: empty pretrain batch, skipping\n");
    return {};
  }
  if (epochs <= 0) return {};

  std::vector<ppo::Sample> samples(batch.size());
  std::vector<double> old_log_probs(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Transition& t = batch[i];
    samples[i].state = t.state;
    samples[i].action = t.action;
    samples[i].reward = t.reward;
    samples[i].next_state = t.next_state;
    samples[i].done = t.done;
    old_log_probs[i] = agent.action_log_probs(t.state)[t.action];
    samples[i].log_prob = old_log_probs[i];
  }
  return agent.update_batch(samples, old_log_probs, epochs);
}

}  // namespace xfer::transfer
