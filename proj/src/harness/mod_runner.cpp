#include <filesystem>
#include <fstream>

#include "xfer/common.hpp"
#include "xfer/env/rideshare/fleet.hpp"
#include "xfer/harness/runners.hpp"

namespace xfer::harness {

namespace {

mod::RoadNetwork build_network(const ModSettings& m) {
  return mod::RoadNetwork::lattice(m.lattice_width, m.lattice_height, m.edge_meters,
                                   m.speed_mps);
}

mod::DemandPattern train_pattern(Mode mode) {
  // The source trains on the morning peak; every target-side mode trains
  // (and evaluates) on the evening peak.
  return mode == Mode::train_source ? mod::DemandPattern::morning
                                    : mod::DemandPattern::evening;
}

}  // namespace

ModSeedResult run_mod_seed(const ExperimentConfig& config, std::uint64_t seed,
                           const transfer::TransferBuffer* source_buffer,
                           const Checkpoint* source_checkpoint) {
  const ModSettings& m = config.mod;
  ModSeedResult result;
  result.seed = seed;

  const mod::RoadNetwork net = build_network(m);
  std::mt19937_64 action_rng(mix_seed(seed, 0x2a));
  std::mt19937_64 sample_rng(mix_seed(seed, 0x2b));

  ppo::PpoAgent agent(mod::kObservationSize, mod::kModActionCount, m.hidden, m.ppo,
                      mix_seed(seed, 0x2c));

  std::optional<rnd::RndPair> rnd_pair;
  std::optional<transfer::TransferBuffer> buffer;

  const bool trains = config.mode == Mode::train_source ||
                      config.mode == Mode::no_transfer || config.mode == Mode::transfer;

  if (config.mode == Mode::train_source) {
    rnd_pair.emplace(mod::kObservationSize, m.rnd, mix_seed(seed, 0x2d));
    buffer.emplace(mod::kObservationSize, mod::kModActionCount, m.capture_window);
  } else if (config.mode == Mode::transfer) {
    if (!source_buffer) throw std::invalid_argument("transfer: no source buffer");
    const double t = transfer::resolve_threshold(*source_buffer, config.threshold);
    auto batch = transfer::filter_and_sample(*source_buffer, t, config.budget, sample_rng);
    result.pretrain_batch = batch.size();
    transfer::pretrain(agent, batch, config.pretrain_epochs);
  } else if (config.mode == Mode::policy_transfer || config.mode == Mode::evaluate_only) {
    if (!source_checkpoint)
      throw std::invalid_argument(to_string(config.mode) + ": no checkpoint");
    agent.load_nets(source_checkpoint->policy, source_checkpoint->value);
  } else if (config.mode != Mode::no_transfer) {
    throw std::invalid_argument("run_mod_seed: unsupported mode " +
                                to_string(config.mode));
  }

  if (trains) {
    std::mt19937_64 demand_rng(mix_seed(seed, 0x2e));
    const auto training_demand = mod::generate_demand(
        net, train_pattern(config.mode), m.training_requests, demand_rng, m.demand);
    const auto train_result = mod::train_fleet(
        agent, rnd_pair ? &*rnd_pair : nullptr, buffer ? &*buffer : nullptr, net,
        training_demand, m.world, m.rounds, m.vehicles_per_round, mix_seed(seed, 0x2f),
        action_rng);
    result.episode_rewards.reserve(train_result.episodes.size());
    const long total_episodes =
        static_cast<long>(m.rounds) * m.vehicles_per_round;
    long window_decisions = 0;
    for (std::size_t i = 0; i < train_result.episodes.size(); ++i) {
      result.episode_rewards.push_back(train_result.episodes[i].reward_sum);
      if (buffer && transfer::TransferBuffer::in_capture_window(
                        static_cast<long>(i), total_episodes, m.capture_window))
        window_decisions += train_result.episodes[i].decisions;
    }
    result.decisions_in_window = window_decisions;
  }

  // Evaluation fleet on the target demand (morning only for the pure
  // source condition).
  const auto eval_pattern = config.mode == Mode::train_source
                                ? mod::DemandPattern::morning
                                : mod::DemandPattern::evening;
  std::mt19937_64 eval_demand_rng(mix_seed(seed, 0x30));
  const auto eval_demand =
      mod::generate_demand(net, eval_pattern, m.eval_requests, eval_demand_rng, m.demand);

  namespace fs = std::filesystem;
  fs::create_directories(config.out_dir);
  std::ofstream trace_out;
  std::ostream* trace_stream = nullptr;
  if (config.emit_trace) {
    result.trace_file =
        (fs::path(config.out_dir) /
         ("trace_" + to_string(config.mode) + "_seed" + std::to_string(seed) + ".jsonl"))
            .string();
    trace_out.open(result.trace_file);
    trace_stream = &trace_out;
  }
  const auto trace = mod::evaluate_fleet(agent, net, eval_demand, m.world,
                                         m.eval_vehicles, mix_seed(seed, 0x31),
                                         trace_stream);
  result.metrics = compute_mod_metrics(trace);

  if (config.mode == Mode::train_source) {
    result.buffer_size = static_cast<long>(buffer->size());
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
