#pragma once

#include <random>
#include <utility>

#include "xfer/net/adam.hpp"
#include "xfer/net/dense_net.hpp"

namespace xfer::ppo {

using net::Vec;

struct PpoConfig {
  double gamma = 0.99;
  double clip_eps = 0.2;
  int epochs = 10;
  int update_iter = 500;
  double learning_rate = 1e-3;
};

/// One agent-environment interaction as stored in the rollout.
struct Sample {
  Vec state;
  int action = 0;
  double log_prob = 0.0;
  double reward = 0.0;
  Vec next_state;
  bool done = false;
};

struct UpdateStats {
  double policy_loss = 0.0;  // mean over final epoch
  double value_loss = 0.0;
  int epochs = 0;
  std::size_t batch_size = 0;
};

Vec softmax(std::span<const double> logits);
Vec log_softmax(std::span<const double> logits);

/// Clipped PPO objective for one sample: min(ratio*adv, clip(ratio)*adv).
/// `dratio` receives d(objective)/d(ratio) so callers can chain through
/// ratio = exp(new_logp - old_logp).
double clipped_objective(double ratio, double advantage, double clip_eps, double& dratio);

/// Actor-critic PPO with separate policy and value nets, one-step TD
/// advantages and full-batch clipped-surrogate updates.
class PpoAgent {
 public:
  PpoAgent(int state_dim, int action_count, const std::vector<int>& hidden_sizes,
           PpoConfig config, std::uint64_t seed);

  /// explore=true samples from softmax(logits); explore=false takes the
  /// argmax. Returns (action, log-probability of that action).
  std::pair<int, double> select_action(std::span<const double> state, bool explore,
                                       std::mt19937_64& rng);

  /// Log-probabilities of every action in `state` under the current policy.
  Vec action_log_probs(std::span<const double> state) const;

  /// A = r + gamma * V(s') * (1 - done) - V(s).
  double one_step_advantage(const Sample& s) const;

  void store(Sample s) { rollout_.push_back(std::move(s)); }
  std::size_t rollout_size() const { return rollout_.size(); }
  const std::vector<Sample>& rollout() const { return rollout_; }

  /// PPO update over the current rollout (old log-probs as stored at
  /// sampling time); clears the rollout.
  UpdateStats update();

  /// Core update on an explicit batch: advantages and value targets are
  /// computed once up front, then `epochs` clipped-surrogate passes.
  UpdateStats update_batch(std::span<const Sample> batch,
                           std::span<const double> old_log_probs, int epochs);

  int state_dim() const { return policy_.input_size(); }
  int action_count() const { return policy_.output_size(); }
  const PpoConfig& config() const { return config_; }
  net::DenseNet& policy() { return policy_; }
  const net::DenseNet& policy() const { return policy_; }
  net::DenseNet& value() { return value_; }
  const net::DenseNet& value() const { return value_; }

  /// Replaces both nets (e.g. from a checkpoint); resets optimizer moments.
  void load_nets(net::DenseNet policy, net::DenseNet value);

 private:
  net::DenseNet policy_;
  net::DenseNet value_;
  net::AdamState policy_opt_;
  net::AdamState value_opt_;
  PpoConfig config_;
  std::vector<Sample> rollout_;
};

}  // namespace xfer::ppo
