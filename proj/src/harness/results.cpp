#include "xfer/harness/results.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

namespace xfer::harness {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

}  // namespace

void write_seed_series_csv(const std::string& dir,
                           const std::vector<PpSeedResult>& results) {
  fs::create_directories(dir);
  for (const auto& r : results) {
    auto out = open_out((fs::path(dir) / ("seed_" + std::to_string(r.seed) + ".csv")).string());
    out << "episode,reward\n";
    for (std::size_t e = 0; e < r.episode_rewards.size(); ++e)
      out << e << ',' << format_double(r.episode_rewards[e]) << '\n';
  }
}

void write_aggregate_csv(const std::string& path,
                         const std::vector<std::vector<double>>& series) {
  auto out = open_out(path);
  out << "episode,mean,std\n";
  if (series.empty()) return;
  const std::size_t episodes = series.front().size();
  for (const auto& s : series)
    if (s.size() != episodes)
      throw std::invalid_argument("write_aggregate_csv: ragged series");
  for (std::size_t e = 0; e < episodes; ++e) {
    double mean = 0.0;
    for (const auto& s : series) mean += s[e];
    mean /= static_cast<double>(series.size());
    double var = 0.0;
    for (const auto& s : series) var += (s[e] - mean) * (s[e] - mean);
    var /= static_cast<double>(series.size());
    out << e << ',' << format_double(mean) << ',' << format_double(std::sqrt(var)) << '\n';
  }
}

void write_mod_metrics_csv(const std::string& path,
                           const std::vector<std::pair<std::string, ModMetrics>>& rows) {
  auto out = open_out(path);
  out << "scenario,served_pct,rs_pct,sigma_pass,mean_distance_km,detour_ratio_pct\n";
  for (const auto& [label, m] : rows) {
    out << label << ',' << format_double(m.served_pct) << ',' << format_double(m.rs_pct)
        << ',' << format_double(m.sigma_pass) << ',' << format_double(m.mean_distance_km)
        << ',' << format_double(m.detour_ratio_pct) << '\n';
  }
}

void write_waiting_times_csv(const std::string& path, const ModMetrics& metrics) {
  auto out = open_out(path);
  out << "waiting_time_s\n";
  for (double w : metrics.waiting_times_s) out << format_double(w) << '\n';
}

void write_buffer_stats_csv(
    const std::string& path,
    const std::vector<std::pair<std::uint64_t, std::pair<long, long>>>& rows) {
  auto out = open_out(path);
  out << "seed,buffer_size,decisions_in_capture_window\n";
  for (const auto& [seed, sizes] : rows)
    out << seed << ',' << sizes.first << ',' << sizes.second << '\n';
}

void write_config_snapshot(const std::string& dir, const ExperimentConfig& config) {
  fs::create_directories(dir);
  auto out = open_out((fs::path(dir) / "config.json").string());
  out << config_to_json(config).dump(2) << '\n';
}

}  // namespace xfer::harness
