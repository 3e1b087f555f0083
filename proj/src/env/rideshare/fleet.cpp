#include "xfer/env/rideshare/fleet.hpp"

#include <unordered_set>

#include "xfer/common.hpp"

namespace xfer::mod {

FleetTrainResult train_fleet(ppo::PpoAgent& agent, rnd::RndPair* rnd,
                             transfer::TransferBuffer* buffer, const RoadNetwork& net,
                             const std::vector<RideRequest>& demand,
                             const ModConfig& config, int rounds, int vehicles_per_round,
                             std::uint64_t seed, std::mt19937_64& action_rng) {
  FleetTrainResult result;
  const long total_episodes = static_cast<long>(rounds) * vehicles_per_round;
  long episode = 0;

  ModConfig episode_config = config;
  episode_config.vehicle_count = 1;

  for (int round = 0; round < rounds; ++round) {
    std::unordered_set<int> served_ids;  // request ids served earlier this round
    for (int v = 0; v < vehicles_per_round; ++v) {
      std::vector<RideRequest> pool;
      pool.reserve(demand.size());
      for (const RideRequest& r : demand)
        if (!served_ids.count(r.id)) pool.push_back(r);

      World world(net, std::move(pool), episode_config,
                  mix_seed(seed, static_cast<std::uint64_t>(episode)));

      FleetEpisodeStats stats;
      stats.round = round;
      stats.vehicle_of_round = v;

      auto policy = [&](std::span<const double> obs, int, double) {
        return agent.select_action(obs, /*explore=*/true, action_rng);
      };
      auto on_close = [&](const ClosedTransition& ct) {
        stats.reward_sum += ct.reward;
        ppo::Sample s;
        s.state = ct.state;
        s.action = ct.action;
        s.log_prob = ct.log_prob;
        s.reward = ct.reward;
        s.next_state = ct.next_state;
        s.done = ct.done;
        agent.store(std::move(s));
        if (buffer && rnd) {
          transfer::Transition t;
          t.state = ct.state;
          t.action = ct.action;
          t.reward = ct.reward;
          t.next_state = ct.next_state;
          t.done = ct.done;
          t.uncertainty = rnd->uncertainty(ct.state);
          buffer->record(episode, total_episodes, std::move(t));
        }
        if (agent.rollout_size() >= static_cast<std::size_t>(agent.config().update_iter)) {
          std::vector<Vec> states;
          states.reserve(agent.rollout_size());
          for (const auto& sample : agent.rollout()) states.push_back(sample.state);
          agent.update();
          if (rnd) rnd->update(states);
        }
      };

      const EpisodeTrace trace = world.run(policy, on_close);
      stats.decisions = trace.decision_count;
      for (const RequestOutcome& o : trace.requests) {
        if (o.final_status == RideRequest::Status::served) {
          served_ids.insert(o.id);
          ++stats.served;
        }
      }
      result.total_decisions += stats.decisions;
      result.episodes.push_back(stats);
      ++episode;
    }
  }
  return result;
}

EpisodeTrace evaluate_fleet(const ppo::PpoAgent& agent, const RoadNetwork& net,
                            const std::vector<RideRequest>& demand, ModConfig config,
                            int vehicle_count, std::uint64_t seed,
                            std::ostream* trace_jsonl) {
  config.vehicle_count = vehicle_count;
  World world(net, demand, config, mix_seed(seed, 0xe7a1));
  std::mt19937_64 action_rng(mix_seed(seed, 0xac7));
  auto policy = [&](std::span<const double> obs, int, double) {
    const Vec lp = agent.action_log_probs(obs);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double u = unit(action_rng);
    double acc = 0.0;
    int action = static_cast<int>(lp.size()) - 1;
    for (std::size_t i = 0; i < lp.size(); ++i) {
      acc += std::exp(lp[i]);
      if (u < acc) {
        action = static_cast<int>(i);
        break;
      }
    }
    return std::make_pair(action, lp[action]);
  };
  return world.run(policy, nullptr, trace_jsonl);
}

}  // namespace xfer::mod
