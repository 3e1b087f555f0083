#include "xfer/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "xfer/net/batch.hpp"

namespace xfer::ppo {

Vec softmax(std::span<const double> logits) {
  Vec p(logits.size());
  const double m = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - m);
    sum += p[i];
  }
  for (auto& v : p) v /= sum;
  return p;
}

Vec log_softmax(std::span<const double> logits) {
  Vec lp(logits.size());
  const double m = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) sum += std::exp(logits[i] - m);
  const double lse = m + std::log(sum);
  for (std::size_t i = 0; i < logits.size(); ++i) lp[i] = logits[i] - lse;
  return lp;
}

double clipped_objective(double ratio, double advantage, double clip_eps, double& dratio) {
  const double unclipped = ratio * advantage;
  const double clamped = std::clamp(ratio, 1.0 - clip_eps, 1.0 + clip_eps);
  const double clipped = clamped * advantage;
  if (unclipped <= clipped) {
    dratio = advantage;
    return unclipped;
  }
  dratio = (ratio > 1.0 - clip_eps && ratio < 1.0 + clip_eps) ? advantage : 0.0;
  return clipped;
}

PpoAgent::PpoAgent(int state_dim, int action_count, const std::vector<int>& hidden_sizes,
                   PpoConfig config, std::uint64_t seed)
    : config_(config) {
  std::vector<int> policy_sizes{state_dim};
  policy_sizes.insert(policy_sizes.end(), hidden_sizes.begin(), hidden_sizes.end());
  policy_sizes.push_back(action_count);
  std::vector<int> value_sizes{state_dim};
  value_sizes.insert(value_sizes.end(), hidden_sizes.begin(), hidden_sizes.end());
  value_sizes.push_back(1);
  policy_ = net::DenseNet(policy_sizes, seed);
  value_ = net::DenseNet(value_sizes, seed + 1);
  policy_opt_ = net::AdamState::for_net(policy_, config_.learning_rate);
  value_opt_ = net::AdamState::for_net(value_, config_.learning_rate);
}

std::pair<int, double> PpoAgent::select_action(std::span<const double> state, bool explore,
                                               std::mt19937_64& rng) {
  const Vec logits = policy_.evaluate(state);
  for (double v : logits)
    if (!std::isfinite(v)) throw std::runtime_error("select_action: non-finite logits");

  int action = 0;
  if (explore) {
    const Vec p = softmax(logits);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double u = unit(rng);
    double acc = 0.0;
    action = static_cast<int>(p.size()) - 1;
    for (std::size_t i = 0; i < p.size(); ++i) {
      acc += p[i];
      if (u < acc) {
        action = static_cast<int>(i);
        break;
      }
    }
  } else {
    action = static_cast<int>(
        std::max_element(logits.begin(), logits.end()) - logits.begin());
  }
  const Vec lp = log_softmax(logits);
  return {action, lp[action]};
}

Vec PpoAgent::action_log_probs(std::span<const double> state) const {
  return log_softmax(policy_.evaluate(state));
}

double PpoAgent::one_step_advantage(const Sample& s) const {
  const double v_s = value_.evaluate(s.state)[0];
  const double v_next = s.done ? 0.0 : value_.evaluate(s.next_state)[0];
  return s.reward + config_.gamma * v_next * (s.done ? 0.0 : 1.0) - v_s;
}

UpdateStats PpoAgent::update() {
  std::vector<double> old_lp(rollout_.size());
  for (std::size_t i = 0; i < rollout_.size(); ++i) old_lp[i] = rollout_[i].log_prob;
  UpdateStats stats = update_batch(rollout_, old_lp, config_.epochs);
  rollout_.clear();
  return stats;
}

UpdateStats PpoAgent::update_batch(std::span<const Sample> batch,
                                   std::span<const double> old_log_probs, int epochs) {
  if (batch.empty()) throw std::invalid_argument("ppo update: empty batch");
  if (old_log_probs.size() != batch.size())
    throw std::invalid_argument("ppo update: old log-prob count mismatch");

  const std::size_t n = batch.size();
  std::vector<Vec> states(n);
  std::vector<int> actions(n);
  for (std::size_t i = 0; i < n; ++i) {
    states[i] = batch[i].state;
    actions[i] = batch[i].action;
  }

  // Advantages and value targets are fixed at update start; the K epochs
  // then re-evaluate only the policy ratio and V(s).
  std::vector<double> advantages(n), targets(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Sample& s = batch[i];
    const double v_next = s.done ? 0.0 : value_.evaluate(s.next_state)[0];
    targets[i] = s.reward + config_.gamma * v_next * (s.done ? 0.0 : 1.0);
    advantages[i] = targets[i] - value_.evaluate(s.state)[0];
  }

  const net::DenseNet policy_backup = policy_;
  const net::DenseNet value_backup = value_;
  const double inv_n = 1.0 / static_cast<double>(n);
  const double clip_eps = config_.clip_eps;

  UpdateStats stats;
  stats.batch_size = n;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    net::GradientTape policy_tape = policy_.make_tape();
    const double policy_loss = net::batch_backward(
        policy_, states,
        [&](std::size_t i, std::span<const double> logits, std::span<double> gout) {
          const Vec lp = log_softmax(logits);
          const int a = actions[i];
          const double ratio = std::exp(lp[a] - old_log_probs[i]);
          double dratio = 0.0;
          const double obj = clipped_objective(ratio, advantages[i], clip_eps, dratio);
          const double dloss_dlp = -dratio * ratio * inv_n;
          for (std::size_t j = 0; j < gout.size(); ++j) {
            const double p_j = std::exp(lp[j]);
            gout[j] = dloss_dlp * ((static_cast<int>(j) == a ? 1.0 : 0.0) - p_j);
          }
          return -obj * inv_n;
        },
        policy_tape);

    net::GradientTape value_tape = value_.make_tape();
    const double value_loss = net::batch_backward(
        value_, states,
        [&](std::size_t i, std::span<const double> out, std::span<double> gout) {
          const double err = out[0] - targets[i];
          gout[0] = 2.0 * err * inv_n;
          return err * err * inv_n;
        },
        value_tape);

    if (!std::isfinite(policy_loss) || !std::isfinite(value_loss) ||
        !policy_tape.is_finite() || !value_tape.is_finite()) {
      policy_ = policy_backup;
      value_ = value_backup;
      throw std::runtime_error("ppo update: non-finite loss, update aborted");
    }

    net::adam_step(policy_, policy_tape, policy_opt_);
    net::adam_step(value_, value_tape, value_opt_);
    stats.policy_loss = policy_loss;
    stats.value_loss = value_loss;
  }
  stats.epochs = epochs;
  return stats;
}

void PpoAgent::load_nets(net::DenseNet policy, net::DenseNet value) {
  policy_ = std::move(policy);
  value_ = std::move(value);
  policy_opt_ = net::AdamState::for_net(policy_, config_.learning_rate);
  value_opt_ = net::AdamState::for_net(value_, config_.learning_rate);
}

}  // namespace xfer::ppo
