#include "xfer/harness/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace xfer::harness {

ModMetrics compute_mod_metrics(const mod::EpisodeTrace& trace) {
  if (trace.truncated)
    throw std::runtime_error("compute_mod_metrics: truncated episode trace");

  ModMetrics m;
  m.total_requests = static_cast<long>(trace.requests.size());

  std::map<int, std::vector<const mod::RequestOutcome*>> per_vehicle;
  for (const auto& r : trace.requests) {
    switch (r.final_status) {
      case mod::RideRequest::Status::served:
        ++m.served;
        per_vehicle[r.vehicle].push_back(&r);
        m.waiting_times_s.push_back(r.board_time - r.issue_time);
        break;
      case mod::RideRequest::Status::expired:
        ++m.expired;
        break;
      default:
        throw std::runtime_error(
            "compute_mod_metrics: incomplete trace (live request at episode end)");
    }
  }
  if (m.total_requests > 0)
    m.served_pct = 100.0 * static_cast<double>(m.served) / m.total_requests;

  // %RS: a served request rides shared iff its onboard interval overlaps
  // another served request's onboard interval in the same vehicle
  // (touching endpoints do not count as overlap).
  long shared = 0;
  double detour_sum_pct = 0.0;
  for (const auto& [vehicle, list] : per_vehicle) {
    for (const auto* a : list) {
      bool overlap = false;
      for (const auto* b : list) {
        if (a == b) continue;
        if (std::max(a->board_time, b->board_time) <
            std::min(a->alight_time, b->alight_time)) {
          overlap = true;
          break;
        }
      }
      if (overlap) ++shared;
      const double onboard_m = a->alight_odometer_m - a->board_odometer_m;
      if (a->direct_distance_m > 0.0)
        detour_sum_pct += 100.0 * (onboard_m - a->direct_distance_m) / a->direct_distance_m;
    }
  }
  if (m.served > 0) {
    m.rs_pct = 100.0 * static_cast<double>(shared) / m.served;
    m.detour_ratio_pct = detour_sum_pct / static_cast<double>(m.served);
  }

  // Passenger balance and mileage are fleet-level (all vehicles, including
  // ones that served nothing).
  if (!trace.vehicles.empty()) {
    double mean_pax = 0.0, mean_dist = 0.0;
    for (const auto& v : trace.vehicles) {
      mean_pax += v.served_passengers;
      mean_dist += v.distance_m;
    }
    mean_pax /= static_cast<double>(trace.vehicles.size());
    mean_dist /= static_cast<double>(trace.vehicles.size());
    double var = 0.0;
    for (const auto& v : trace.vehicles) {
      const double d = v.served_passengers - mean_pax;
      var += d * d;
    }
    m.sigma_pass = var / static_cast<double>(trace.vehicles.size());
    m.mean_distance_km = mean_dist / 1000.0;
  }
  std::sort(m.waiting_times_s.begin(), m.waiting_times_s.end());
  return m;
}

mod::EpisodeTrace trace_from_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("trace_from_jsonl: cannot open " + path);

  mod::EpisodeTrace trace;
  std::map<int, std::size_t> request_index;
  std::map<int, std::size_t> vehicle_index;
  std::string line;
  bool saw_end = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    const std::string ev = j.at("ev").get<std::string>();
    if (ev == "issue") {
      mod::RequestOutcome r;
      r.id = j.at("id").get<int>();
      r.issue_time = j.at("t").get<double>();
      r.origin = j.at("origin").get<int>();
      r.dest = j.at("dest").get<int>();
      r.passengers = j.at("pax").get<int>();
      r.expiry_time = j.at("expiry").get<double>();
      r.direct_distance_m = j.at("direct_m").get<double>();
      request_index[r.id] = trace.requests.size();
      trace.requests.push_back(r);
    } else if (ev == "assign") {
      auto& r = trace.requests.at(request_index.at(j.at("id").get<int>()));
      r.vehicle = j.at("vehicle").get<int>();
      r.assign_time = j.at("t").get<double>();
      r.final_status = mod::RideRequest::Status::assigned;
    } else if (ev == "board") {
      auto& r = trace.requests.at(request_index.at(j.at("id").get<int>()));
      r.board_time = j.at("t").get<double>();
      r.board_odometer_m = j.at("odometer_m").get<double>();
      r.final_status = mod::RideRequest::Status::onboard;
    } else if (ev == "alight") {
      auto& r = trace.requests.at(request_index.at(j.at("id").get<int>()));
      r.alight_time = j.at("t").get<double>();
      r.alight_odometer_m = j.at("odometer_m").get<double>();
      r.final_status = mod::RideRequest::Status::served;
    } else if (ev == "expire") {
      auto& r = trace.requests.at(request_index.at(j.at("id").get<int>()));
      r.final_status = mod::RideRequest::Status::expired;
    } else if (ev == "vehicle_end") {
      mod::VehicleOutcome v;
      v.id = j.at("vehicle").get<int>();
      v.spawn_node = j.at("spawn").get<int>();
      v.distance_m = j.at("distance_m").get<double>();
      v.served_requests = j.at("served_requests").get<int>();
      v.served_passengers = j.at("served_passengers").get<int>();
      vehicle_index[v.id] = trace.vehicles.size();
      trace.vehicles.push_back(v);
    } else if (ev == "end") {
      trace.end_time = j.at("t").get<double>();
      trace.truncated = j.at("truncated").get<bool>();
      trace.decision_count = j.at("decisions").get<long>();
      saw_end = true;
    }
    // spawn/decision events carry no metric content
  }
  if (!saw_end)
    throw std::runtime_error("trace_from_jsonl: no end event, incomplete trace " + path);
  return trace;
}

}  // namespace xfer::harness
