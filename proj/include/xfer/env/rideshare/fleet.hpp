#pragma once

#include "xfer/env/rideshare/world.hpp"
#include "xfer/ppo.hpp"
#include "xfer/rnd.hpp"
#include "xfer/transfer.hpp"

namespace xfer::mod {

struct FleetEpisodeStats {
  int round = 0;
  int vehicle_of_round = 0;
  double reward_sum = 0.0;
  long decisions = 0;
  long served = 0;
};

struct FleetTrainResult {
  std::vector<FleetEpisodeStats> episodes;
  long total_decisions = 0;
};

/// The rounds x vehicles_per_round training protocol: sequential
/// single-vehicle episodes sharing one PPO model. Within a round each
/// vehicle faces the pool of requests the previous vehicles could not
/// serve; the pool is restored between rounds.
///
/// `rnd` and `buffer` wire up source-side confidence labelling: when both
/// are given, every interaction from an episode inside the buffer's capture
/// window is recorded with u from the RND pair, and the RND predictor is
/// optimized on each policy update's visited states.
FleetTrainResult train_fleet(ppo::PpoAgent& agent, rnd::RndPair* rnd,
                             transfer::TransferBuffer* buffer, const RoadNetwork& net,
                             const std::vector<RideRequest>& demand,
                             const ModConfig& config, int rounds, int vehicles_per_round,
                             std::uint64_t seed, std::mt19937_64& action_rng);

/// Multi-vehicle evaluation with a frozen model: the policy still samples
/// from its action distribution, but no updates happen.
EpisodeTrace evaluate_fleet(const ppo::PpoAgent& agent, const RoadNetwork& net,
                            const std::vector<RideRequest>& demand, ModConfig config,
                            int vehicle_count, std::uint64_t seed,
                            std::ostream* trace_jsonl = nullptr);

}  // namespace xfer::mod
