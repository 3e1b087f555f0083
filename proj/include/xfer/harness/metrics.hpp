#pragma once

#include <string>

#include "xfer/env/rideshare/world.hpp"

namespace xfer::harness {

/// The fleet metrics reported per evaluation run: demand satisfaction,
/// ride-sharing share, passenger balance, mileage and detour ratio, plus
/// the per-request waiting-time distribution.
struct ModMetrics {
  long total_requests = 0;
  long served = 0;
  long expired = 0;
  double served_pct = 0.0;     // served / total * 100
  double rs_pct = 0.0;         // served requests with overlapping onboard intervals
  double sigma_pass = 0.0;     // variance of served passengers per vehicle
  double mean_distance_km = 0.0;
  double detour_ratio_pct = 0.0;  // mean extra onboard distance over direct, percent
  std::vector<double> waiting_times_s;  // board - issue, per served request
};

/// Computes the metrics from a completed episode trace. Throws on a
/// truncated or otherwise incomplete trace (live requests at episode end).
ModMetrics compute_mod_metrics(const mod::EpisodeTrace& trace);

/// Rebuilds an episode trace from the JSON-lines event log the simulator
/// emits, so metrics can be recomputed offline.
mod::EpisodeTrace trace_from_jsonl(const std::string& path);

}  // namespace xfer::harness
