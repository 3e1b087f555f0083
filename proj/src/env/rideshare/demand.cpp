#include "xfer/env/rideshare/demand.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace xfer::mod {

namespace {

int draw_node(const RoadNetwork& net, bool business, double hot_zone_prob,
              std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> any(0, net.node_count() - 1);
  if (unit(rng) >= hot_zone_prob) return any(rng);
  // Rejection-sample inside the requested zone.
  for (;;) {
    const int v = any(rng);
    if (net.in_business_zone(v) == business) return v;
  }
}

}  // namespace

std::vector<RideRequest> generate_demand(const RoadNetwork& net, DemandPattern pattern,
                                         long count, std::mt19937_64& rng,
                                         const DemandConfig& config) {
  if (count <= 0) throw std::invalid_argument("generate_demand: count must be positive");
  std::vector<RideRequest> out;
  out.reserve(count);
  std::uniform_int_distribution<long> when(0, static_cast<long>(config.window_s));
  std::discrete_distribution<int> pax(config.passenger_weights.begin(),
                                      config.passenger_weights.end());
  const bool origin_business = (pattern == DemandPattern::evening);
  for (long i = 0; i < count; ++i) {
    RideRequest r;
    r.id = static_cast<int>(i);
    r.origin = draw_node(net, origin_business, config.hot_zone_prob, rng);
    do {
      r.dest = draw_node(net, !origin_business, config.hot_zone_prob, rng);
    } while (r.dest == r.origin);
    r.passengers = 1 + pax(rng);
    r.issue_time = static_cast<double>(when(rng));
    r.expiry_time = r.issue_time + config.expiry_s;
    out.push_back(r);
  }
  return out;
}

std::vector<RideRequest> ingest_trips_csv(const std::string& path, const RoadNetwork& net,
                                          double expiry_s) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("ingest_trips_csv: cannot open " + path);

  std::vector<RideRequest> out;
  std::string errors;
  auto reject = [&](long line, const std::string& why) {
    errors += "line " + std::to_string(line) + ": " + why + "\n";
  };

  std::string line;
  long line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (!header_seen) {
      header_seen = true;
      if (line != "id,issue_time_s,origin_node,dest_node,passengers") {
        reject(line_no, "missing or malformed header");
        break;
      }
      continue;
    }
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 5) {
      reject(line_no, "expected 5 columns, got " + std::to_string(fields.size()));
      continue;
    }
    auto parse_int = [&](const std::string& s, const char* name, long& value) {
      std::size_t pos = 0;
      try {
        value = std::stol(s, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos != s.size()) {
        reject(line_no, std::string(name) + " is not an integer: '" + s + "'");
        return false;
      }
      return true;
    };
    long id = 0, origin = 0, dest = 0, pax = 0;
    double issue = 0.0;
    bool ok = parse_int(fields[0], "id", id);
    {
      std::size_t pos = 0;
      try {
        issue = std::stod(fields[1], &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos != fields[1].size() || issue < 0.0) {
        reject(line_no, "issue_time_s is not a non-negative number: '" + fields[1] + "'");
        ok = false;
      }
    }
    ok = parse_int(fields[2], "origin_node", origin) && ok;
    ok = parse_int(fields[3], "dest_node", dest) && ok;
    ok = parse_int(fields[4], "passengers", pax) && ok;
    if (!ok) continue;

    if (origin < 0 || origin >= net.node_count())
      reject(line_no, "origin_node out of range");
    else if (dest < 0 || dest >= net.node_count())
      reject(line_no, "dest_node out of range");
    else if (origin == dest)
      reject(line_no, "origin equals destination");
    else if (pax < 1 || pax > 4)
      reject(line_no, "passengers must be in 1..4");
    else {
      RideRequest r;
      r.id = static_cast<int>(id);
      r.origin = static_cast<int>(origin);
      r.dest = static_cast<int>(dest);
      r.passengers = static_cast<int>(pax);
      r.issue_time = issue;
      r.expiry_time = issue + expiry_s;
      out.push_back(r);
    }
  }
  if (!header_seen && line_no == 0) return {};  // empty file -> empty list
  if (!errors.empty()) throw std::runtime_error("ingest_trips_csv: " + path + "\n" + errors);
  return out;
}

void export_trips_csv(const std::vector<RideRequest>& requests, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("export_trips_csv: cannot open " + path);
  out << "id,issue_time_s,origin_node,dest_node,passengers\n";
  char buf[64];
  for (const auto& r : requests) {
    std::snprintf(buf, sizeof buf, "%.17g", r.issue_time);
    out << r.id << ',' << buf << ',' << r.origin << ',' << r.dest << ','
        << r.passengers << '\n';
  }
  if (!out) throw std::runtime_error("export_trips_csv: write failed for " + path);
}

}  // namespace xfer::mod
