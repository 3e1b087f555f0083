#pragma once

#include "xfer/harness/results.hpp"
#include "xfer/harness/runners.hpp"

namespace xfer::harness {

struct ExperimentOutput {
  std::vector<PpSeedResult> pp_results;
  std::vector<ModSeedResult> mod_results;
};

/// Runs the configured experiment end-to-end: per-seed pipelines (seeds in
/// parallel), then aggregate files under config.out_dir. Throws on
/// validation or runtime failure.
ExperimentOutput run_experiment(const ExperimentConfig& config);

}  // namespace xfer::harness
