#pragma once

#include <string>
#include <utility>

#include "xfer/harness/runners.hpp"

namespace xfer::harness {

/// CSV writers. Doubles are printed with "%.17g" so files are reproducible
/// byte-for-byte and re-parse to the in-memory values.
void write_seed_series_csv(const std::string& dir,
                           const std::vector<PpSeedResult>& results);
void write_aggregate_csv(const std::string& path,
                         const std::vector<std::vector<double>>& series);
void write_mod_metrics_csv(const std::string& path,
                           const std::vector<std::pair<std::string, ModMetrics>>& rows);
void write_waiting_times_csv(const std::string& path, const ModMetrics& metrics);
void write_buffer_stats_csv(const std::string& path,
                            const std::vector<std::pair<std::uint64_t, std::pair<long, long>>>&
                                seed_size_decisions);
void write_config_snapshot(const std::string& dir, const ExperimentConfig& config);

std::string format_double(double v);

}  // namespace xfer::harness
