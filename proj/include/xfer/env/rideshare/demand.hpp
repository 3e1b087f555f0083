#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>

#include "xfer/env/rideshare/network.hpp"

namespace xfer::mod {

struct RideRequest {
  enum class Status { pending, assigned, onboard, served, expired };

  int id = 0;
  int origin = 0;
  int dest = 0;
  int passengers = 1;
  double issue_time = 0.0;
  double expiry_time = 0.0;
  Status status = Status::pending;
};

enum class DemandPattern { morning, evening };

struct DemandConfig {
  double window_s = 10800.0;       // 3-hour peak slot
  double expiry_s = 600.0;         // request lifetime after issue
  double hot_zone_prob = 0.8;      // probability of drawing from the hot zone
  std::array<double, 4> passenger_weights{0.6, 0.25, 0.1, 0.05};
};

/// Synthetic peak-slot demand. Morning concentrates origins in the
/// residential ring and destinations in the central business block;
/// evening reverses the two.
std::vector<RideRequest> generate_demand(const RoadNetwork& net, DemandPattern pattern,
                                         long count, std::mt19937_64& rng,
                                         const DemandConfig& config = {});

/// CSV schema: id,issue_time_s,origin_node,dest_node,passengers.
/// Rows violating the request invariants are rejected with line numbers.
std::vector<RideRequest> ingest_trips_csv(const std::string& path, const RoadNetwork& net,
                                          double expiry_s = 600.0);
void export_trips_csv(const std::vector<RideRequest>& requests, const std::string& path);

}  // namespace xfer::mod
