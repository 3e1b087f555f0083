#include "xfer/harness/run.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>

namespace xfer::harness {

namespace fs = std::filesystem;

namespace {

// Seeds run as independent workers; shared inputs are read-only and the
// results land at fixed indices, so output files do not depend on thread
// scheduling.
template <typename Result, typename Fn>
std::vector<Result> for_each_seed(const std::vector<std::uint64_t>& seeds, Fn&& fn) {
  std::vector<Result> results(seeds.size());
  std::vector<std::string> errors(seeds.size());
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < static_cast<long long>(seeds.size()); ++i) {
    try {
      results[i] = fn(seeds[i]);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (std::size_t i = 0; i < errors.size(); ++i)
    if (!errors[i].empty())
      throw std::runtime_error("seed " + std::to_string(seeds[i]) + ": " + errors[i]);
  return results;
}

}  // namespace

ExperimentOutput run_experiment(const ExperimentConfig& config) {
  validate(config);
  fs::create_directories(config.out_dir);

  std::optional<transfer::TransferBuffer> buffer;
  if (!config.buffer_path.empty()) buffer = transfer::load_buffer(config.buffer_path);
  std::optional<Checkpoint> checkpoint;
  if (!config.checkpoint_path.empty())
    checkpoint = load_checkpoint(config.checkpoint_path);

  ExperimentOutput output;
  if (config.scenario == Scenario::predator_prey) {
    output.pp_results = for_each_seed<PpSeedResult>(config.seeds, [&](std::uint64_t s) {
      return run_pp_seed(config, s, buffer ? &*buffer : nullptr,
                         checkpoint ? &*checkpoint : nullptr);
    });

    write_seed_series_csv(config.out_dir, output.pp_results);
    std::vector<std::vector<double>> series;
    for (const auto& r : output.pp_results) series.push_back(r.episode_rewards);
    write_aggregate_csv((fs::path(config.out_dir) / "aggregate.csv").string(), series);

    if (config.mode == Mode::transfer) {
      // Pretraining consumes B interactions before episode 0; report the
      // equivalent episode shift alongside the raw curves.
      double mean_steps = 0.0, mean_batch = 0.0;
      for (const auto& r : output.pp_results) {
        mean_steps += r.mean_episode_steps;
        mean_batch += static_cast<double>(r.pretrain_batch);
      }
      mean_steps /= static_cast<double>(output.pp_results.size());
      mean_batch /= static_cast<double>(output.pp_results.size());
      const long shift =
          mean_steps > 0 ? std::lround(mean_batch / mean_steps) : 0;
      auto out = std::ofstream(
          (fs::path(config.out_dir) / "pretrain_cost.txt").string());
      out << "mean_pretrain_batch=" << format_double(mean_batch)
          << "\nmean_episode_steps=" << format_double(mean_steps)
          << "\nequivalent_episodes=" << shift << "\n";
    }
    if (config.mode == Mode::train_source) {
      std::vector<std::pair<std::uint64_t, std::pair<long, long>>> rows;
      for (const auto& r : output.pp_results)
        rows.push_back({r.seed, {r.buffer_size, r.decisions_in_window}});
      write_buffer_stats_csv((fs::path(config.out_dir) / "buffer_stats.csv").string(),
                             rows);
    }
  } else {
    output.mod_results = for_each_seed<ModSeedResult>(config.seeds, [&](std::uint64_t s) {
      return run_mod_seed(config, s, buffer ? &*buffer : nullptr,
                          checkpoint ? &*checkpoint : nullptr);
    });

    std::vector<std::pair<std::string, ModMetrics>> rows;
    for (const auto& r : output.mod_results)
      rows.push_back({to_string(config.mode) + "_seed" + std::to_string(r.seed),
                      r.metrics});
    write_mod_metrics_csv((fs::path(config.out_dir) / "mod_metrics.csv").string(), rows);
    for (const auto& r : output.mod_results)
      write_waiting_times_csv(
          (fs::path(config.out_dir) /
           ("waiting_times_seed" + std::to_string(r.seed) + ".csv"))
              .string(),
          r.metrics);
    if (!output.mod_results.empty() && !output.mod_results.front().episode_rewards.empty()) {
      std::vector<std::vector<double>> series;
      for (const auto& r : output.mod_results) series.push_back(r.episode_rewards);
      write_aggregate_csv((fs::path(config.out_dir) / "training_rewards.csv").string(),
                          series);
    }
    if (config.mode == Mode::train_source) {
      std::vector<std::pair<std::uint64_t, std::pair<long, long>>> stats;
      for (const auto& r : output.mod_results)
        stats.push_back({r.seed, {r.buffer_size, r.decisions_in_window}});
      write_buffer_stats_csv((fs::path(config.out_dir) / "buffer_stats.csv").string(),
                             stats);
    }
  }
  write_config_snapshot(config.out_dir, config);
  return output;
}

}  // namespace xfer::harness
