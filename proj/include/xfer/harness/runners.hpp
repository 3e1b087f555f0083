#pragma once

#include "xfer/harness/checkpoint.hpp"
#include "xfer/harness/config.hpp"
#include "xfer/harness/metrics.hpp"

namespace xfer::harness {

struct PpSeedResult {
  std::uint64_t seed = 0;
  std::vector<double> episode_rewards;
  long buffer_size = 0;          // train_source
  long decisions_in_window = 0;  // independently counted capture-window steps
  std::size_t pretrain_batch = 0;  // transfer
  double mean_episode_steps = 0.0;
  std::string buffer_file;      // written artifacts, when any
  std::string checkpoint_file;
};

/// One predator-prey run for one seed. Shared inputs (source buffer,
/// teacher checkpoint) are read-only and may be shared across threads.
PpSeedResult run_pp_seed(const ExperimentConfig& config, std::uint64_t seed,
                         const transfer::TransferBuffer* source_buffer,
                         const Checkpoint* teacher_checkpoint);

struct ModSeedResult {
  std::uint64_t seed = 0;
  ModMetrics metrics;
  std::vector<double> episode_rewards;  // training episodes (empty for eval-only)
  long buffer_size = 0;
  long decisions_in_window = 0;
  std::size_t pretrain_batch = 0;
  std::string buffer_file;
  std::string checkpoint_file;
  std::string trace_file;
};

/// One MoD pipeline run for one seed: train (mode-dependent), then a
/// fleet evaluation, then metrics.
ModSeedResult run_mod_seed(const ExperimentConfig& config, std::uint64_t seed,
                           const transfer::TransferBuffer* source_buffer,
                           const Checkpoint* source_checkpoint);

}  // namespace xfer::harness
