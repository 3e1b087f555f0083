#pragma once

#include <optional>
#include <random>
#include <string>

#include "xfer/ppo.hpp"

namespace xfer::transfer {

using net::Vec;

/// One confidence-labelled interaction (s, a, r, s', u).
struct Transition {
  Vec state;
  int action = 0;
  double reward = 0.0;
  Vec next_state;
  bool done = false;
  double uncertainty = 0.0;
};

/// Confidence threshold: a hardcoded value or a statistic of the buffer.
struct ThresholdSpec {
  enum class Kind { fixed, mean, median };
  Kind kind = Kind::fixed;
  double value = 0.0;

  static ThresholdSpec fixed(double v) { return {Kind::fixed, v}; }
  static ThresholdSpec mean() { return {Kind::mean, 0.0}; }
  static ThresholdSpec median() { return {Kind::median, 0.0}; }
  /// Parses "mean", "median" or a number.
  static ThresholdSpec parse(const std::string& text);
  std::string describe() const;
};

/// Source-side experience buffer. Only interactions from the final
/// `capture_window` fraction of source episodes are recorded.
class TransferBuffer {
 public:
  TransferBuffer() = default;
  TransferBuffer(int state_dim, int action_count, double capture_window);

  /// True iff `episode_index` (0-based) lies in the final capture window
  /// of a `total_episodes`-long run.
  static bool in_capture_window(long episode_index, long total_episodes,
                                double capture_window);

  /// Appends iff the episode is inside the capture window; no-op otherwise.
  void record(long episode_index, long total_episodes, Transition t);

  const std::vector<Transition>& transitions() const { return transitions_; }
  std::vector<Transition>& transitions() { return transitions_; }
  std::size_t size() const { return transitions_.size(); }
  bool empty() const { return transitions_.empty(); }

  int state_dim() const { return state_dim_; }
  int action_count() const { return action_count_; }
  double capture_window() const { return capture_window_; }

 private:
  std::vector<Transition> transitions_;
  int state_dim_ = 0;
  int action_count_ = 0;
  double capture_window_ = 0.0;
};

/// Fixed -> the value itself; mean/median -> statistic over the buffer's
/// uncertainties (median averages the two middles for even counts).
double resolve_threshold(const TransferBuffer& buffer, const ThresholdSpec& spec);

/// Uniform sample without replacement of min(budget, |{u < t}|) transitions
/// from the strict-less-than subset, in randomized order. Short supply is
/// not an error (a warning is logged).
std::vector<Transition> filter_and_sample(const TransferBuffer& buffer, double threshold,
                                          long budget, std::mt19937_64& rng);

/// Pre-trains a freshly initialized agent on transferred experience:
/// old log-probs come from a snapshot of the initial policy (so first-epoch
/// ratios are exactly 1), advantages and targets from the fresh value net,
/// then `epochs` clipped-surrogate passes. Empty batch degrades to a no-op
/// with a warning.
ppo::UpdateStats pretrain(ppo::PpoAgent& agent, std::span<const Transition> batch,
                          int epochs);

// --- buffer files ------------------------------------------------------

/// Flat binary layout (native little-endian):
///   magic "XFERBUF1" | u32 version | u32 state_dim | u32 action_count |
///   f64 capture_window | u64 count | count records of
///   (state f64[dim], i32 action, f64 reward, next_state f64[dim],
///    u8 done, f64 uncertainty).
void save_buffer(const TransferBuffer& buffer, const std::string& path);
TransferBuffer load_buffer(const std::string& path);

/// Lossless JSON-lines alternative: a header object, then one object per
/// transition.
void save_buffer_jsonl(const TransferBuffer& buffer, const std::string& path);
TransferBuffer load_buffer_jsonl(const std::string& path);

}  // namespace xfer::transfer
