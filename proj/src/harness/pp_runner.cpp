#include <filesystem>

#include "xfer/common.hpp"
#include "xfer/env/gridworld.hpp"
#include "xfer/harness/runners.hpp"

namespace xfer::harness {

namespace {

using gridworld::GridWorld;

struct PpLoopHooks {
  rnd::RndPair* rnd = nullptr;                 // trained at the update cadence
  transfer::TransferBuffer* buffer = nullptr;  // source recording
  baselines::Teacher* teacher = nullptr;
  Mode mode = Mode::no_transfer;
  bool learn = true;
  std::mt19937_64* advice_rng = nullptr;
  const baselines::EpsDecayConfig* eps = nullptr;
};

std::vector<double> run_pp_episodes(const PpSettings& settings, GridWorld& env,
                                    ppo::PpoAgent& agent, long episodes,
                                    std::mt19937_64& action_rng, PpLoopHooks hooks,
                                    long* decisions_in_window, long* total_steps) {
  std::vector<double> rewards;
  rewards.reserve(episodes);
  long steps_total = 0;

  for (long ep = 0; ep < episodes; ++ep) {
    ppo::Vec obs = env.reset();
    double ep_reward = 0.0;
    const bool in_window =
        hooks.buffer && transfer::TransferBuffer::in_capture_window(
                            ep, episodes, hooks.buffer->capture_window());
    for (;;) {
      auto [action, log_prob] = agent.select_action(obs, true, action_rng);
      if (hooks.teacher) {
        std::optional<int> advice;
        switch (hooks.mode) {
          case Mode::advice_begin:
            advice = baselines::advice_at_beginning(*hooks.teacher, obs);
            break;
          case Mode::mistake_correction:
            advice = baselines::mistake_correction(*hooks.teacher, obs, action);
            break;
          case Mode::eps_decay:
            advice = baselines::confidence_epsilon_decay(
                *hooks.teacher, *hooks.rnd, obs, ep, *hooks.eps, *hooks.advice_rng);
            break;
          default:
            break;
        }
        if (advice && *advice != action) {
          action = *advice;
          // Advised actions keep the student's own log-probability so the
          // PPO ratios stay on-policy.
          log_prob = agent.action_log_probs(obs)[action];
        }
      }

      const auto step = env.step(static_cast<gridworld::Action>(action));
      ep_reward += step.reward;
      ++steps_total;

      if (hooks.learn) {
        ppo::Sample s;
        s.state = obs;
        s.action = action;
        s.log_prob = log_prob;
        s.reward = step.reward;
        s.next_state = step.observation;
        s.done = step.done;
        agent.store(std::move(s));
        if (agent.rollout_size() >= static_cast<std::size_t>(settings.ppo.update_iter)) {
          std::vector<ppo::Vec> states;
          states.reserve(agent.rollout_size());
          for (const auto& sample : agent.rollout()) states.push_back(sample.state);
          agent.update();
          if (hooks.rnd) hooks.rnd->update(states);
        }
      }
      if (hooks.buffer) {
        if (in_window && decisions_in_window) ++*decisions_in_window;
        transfer::Transition t;
        t.state = obs;
        t.action = action;
        t.reward = step.reward;
        t.next_state = step.observation;
        t.done = step.done;
        t.uncertainty = hooks.rnd->uncertainty(obs);
        hooks.buffer->record(ep, episodes, std::move(t));
      }

      obs = step.observation;
      if (step.done) break;
    }
    rewards.push_back(ep_reward);
  }
  if (total_steps) *total_steps = steps_total;
  return rewards;
}

baselines::Teacher make_teacher(const ExperimentConfig& config,
                                const Checkpoint& ckpt) {
  const auto& sizes = ckpt.policy.layer_sizes();
  std::vector<int> hidden(sizes.begin() + 1, sizes.end() - 1);
  ppo::PpoAgent agent(sizes.front(), sizes.back(), hidden, config.pp.ppo, 0);
  agent.load_nets(ckpt.policy, ckpt.value);
  std::optional<rnd::RndPair> teacher_rnd;
  if (ckpt.has_rnd()) {
    const auto& rt = *ckpt.rnd_target;
    rnd::RndConfig rc{rt.layer_sizes()[1], rt.layer_sizes().back(),
                      config.pp.rnd.learning_rate};
    rnd::RndPair pair(rt.input_size(), rc, 0);
    pair.load_nets(*ckpt.rnd_target, *ckpt.rnd_predictor);
    teacher_rnd = std::move(pair);
  }
  return baselines::Teacher(std::move(agent), std::move(teacher_rnd), config.budget);
}

}  // namespace

PpSeedResult run_pp_seed(const ExperimentConfig& config, std::uint64_t seed,
                         const transfer::TransferBuffer* source_buffer,
                         const Checkpoint* teacher_checkpoint) {
  const PpSettings& pp = config.pp;
  PpSeedResult result;
  result.seed = seed;

  GridWorld env(pp.grid, mix_seed(seed, 0x11));
  std::mt19937_64 action_rng(mix_seed(seed, 0x22));
  std::mt19937_64 advice_rng(mix_seed(seed, 0x33));
  std::mt19937_64 sample_rng(mix_seed(seed, 0x44));

  const int obs_size = env.observation_size();
  ppo::PpoAgent agent(obs_size, gridworld::kActionCount, pp.hidden, pp.ppo,
                      mix_seed(seed, 0x55));

  PpLoopHooks hooks;
  hooks.mode = config.mode;

  std::optional<rnd::RndPair> rnd_pair;
  std::optional<transfer::TransferBuffer> buffer;
  std::optional<baselines::Teacher> teacher;

  switch (config.mode) {
    case Mode::train_source: {
      rnd_pair.emplace(obs_size, pp.rnd, mix_seed(seed, 0x66));
      buffer.emplace(obs_size, gridworld::kActionCount, pp.capture_window);
      hooks.rnd = &*rnd_pair;
      hooks.buffer = &*buffer;
      break;
    }
    case Mode::transfer: {
      if (!source_buffer) throw std::invalid_argument("transfer: no source buffer");
      const double t = transfer::resolve_threshold(*source_buffer, config.threshold);
      auto batch = transfer::filter_and_sample(*source_buffer, t, config.budget, sample_rng);
      result.pretrain_batch = batch.size();
      transfer::pretrain(agent, batch, config.pretrain_epochs);
      break;
    }
    case Mode::advice_begin:
    case Mode::mistake_correction: {
      if (!teacher_checkpoint) throw std::invalid_argument("advising: no checkpoint");
      teacher = make_teacher(config, *teacher_checkpoint);
      hooks.teacher = &*teacher;
      break;
    }
    case Mode::eps_decay: {
      if (!teacher_checkpoint) throw std::invalid_argument("advising: no checkpoint");
      teacher = make_teacher(config, *teacher_checkpoint);
      if (!teacher->rnd)
        throw std::invalid_argument("eps_decay: teacher checkpoint lacks RND nets");
      hooks.teacher = &*teacher;
      rnd_pair.emplace(obs_size, pp.rnd, mix_seed(seed, 0x66));  // student's own
      hooks.rnd = &*rnd_pair;
      hooks.advice_rng = &advice_rng;
      hooks.eps = &config.eps_decay;
      break;
    }
    case Mode::evaluate_only: {
      if (!teacher_checkpoint) throw std::invalid_argument("evaluate: no checkpoint");
      agent.load_nets(teacher_checkpoint->policy, teacher_checkpoint->value);
      hooks.learn = false;
      break;
    }
    case Mode::no_transfer:
      break;
    case Mode::policy_transfer:
      throw std::invalid_argument("policy_transfer is a mod-scenario mode");
  }

  long total_steps = 0;
  result.episode_rewards =
      run_pp_episodes(pp, env, agent, pp.episodes, action_rng, hooks,
                      &result.decisions_in_window, &total_steps);
  result.mean_episode_steps =
      static_cast<double>(total_steps) / static_cast<double>(pp.episodes);

  if (config.mode == Mode::train_source) {
    result.buffer_size = static_cast<long>(buffer->size());
    namespace fs = std::filesystem;
    fs::create_directories(config.out_dir);
    result.buffer_file =
        (fs::path(config.out_dir) / ("buffer_seed" + std::to_string(seed) + ".bin"))
            .string();
    transfer::save_buffer(*buffer, result.buffer_file);
    result.checkpoint_file =
        (fs::path(config.out_dir) / ("checkpoint_seed" + std::to_string(seed) + ".json"))
            .string();
    save_checkpoint(result.checkpoint_file, agent.policy(), agent.value(), &*rnd_pair);
  }
  return result;
}

}  // namespace xfer::harness
