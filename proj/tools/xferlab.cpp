#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "xfer/harness/run.hpp"

namespace {

using namespace xfer::harness;

struct CommonFlags {
  std::string config_file;
  std::string scenario;
  std::string profile;
  std::string threshold;
  std::string buffer;
  std::string checkpoint;
  std::string out;
  std::string seeds;
  long budget = -1;
  bool emit_trace = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_file, "JSON config file (versioned schema)");
  cmd->add_option("--scenario", f.scenario, "predator_prey | mod");
  cmd->add_option("--profile", f.profile, "ci | full");
  cmd->add_option("--threshold", f.threshold, "fixed value | mean | median");
  cmd->add_option("--budget", f.budget, "transfer/advice budget B");
  cmd->add_option("--seeds", f.seeds, "comma-separated seed list, e.g. 1,2,3");
  cmd->add_option("--buffer", f.buffer, "transfer buffer file");
  cmd->add_option("--checkpoint", f.checkpoint, "checkpoint file");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_flag("--trace", f.emit_trace, "write JSONL event traces (mod)");
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t next = text.find(',', pos);
    if (next == std::string::npos) next = text.size();
    const std::string tok = text.substr(pos, next - pos);
    if (!tok.empty()) seeds.push_back(std::stoull(tok));
    pos = next + 1;
  }
  if (seeds.empty()) throw std::invalid_argument("--seeds: empty seed list");
  return seeds;
}

ExperimentConfig assemble(const CommonFlags& f, Mode mode) {
  ExperimentConfig config;
  if (!f.config_file.empty()) {
    config = load_config(f.config_file);
  } else {
    const auto scenario =
        parse_scenario(f.scenario.empty() ? "predator_prey" : f.scenario);
    config = default_config(scenario, f.profile.empty() ? "ci" : f.profile);
  }
  if (!f.scenario.empty()) {
    const auto scenario = parse_scenario(f.scenario);
    if (scenario != config.scenario) {
      const std::string profile = f.profile.empty() ? config.profile : f.profile;
      const ExperimentConfig fresh = default_config(scenario, profile);
      ExperimentConfig merged = fresh;
      merged.seeds = config.seeds;
      merged.threshold = config.threshold;
      merged.budget = config.budget;
      config = merged;
    }
  } else if (!f.profile.empty() && f.config_file.empty()) {
    config = default_config(config.scenario, f.profile);
  }
  config.mode = mode;
  if (!f.threshold.empty())
    config.threshold = xfer::transfer::ThresholdSpec::parse(f.threshold);
  if (f.budget >= 0) config.budget = f.budget;
  if (!f.seeds.empty()) config.seeds = parse_seeds(f.seeds);
  if (!f.buffer.empty()) config.buffer_path = f.buffer;
  if (!f.checkpoint.empty()) config.checkpoint_path = f.checkpoint;
  if (!f.out.empty()) config.out_dir = f.out;
  if (f.emit_trace) config.emit_trace = true;
  return config;
}

int execute(const ExperimentConfig& config) {
  const auto output = run_experiment(config);
  if (config.scenario == Scenario::predator_prey) {
    for (const auto& r : output.pp_results) {
      double mean = 0.0;
      for (double v : r.episode_rewards) mean += v;
      if (!r.episode_rewards.empty()) mean /= r.episode_rewards.size();
      std::printf("seed %llu: %zu episodes, mean reward %.4f\n",
                  static_cast<unsigned long long>(r.seed), r.episode_rewards.size(),
                  mean);
    }
  } else {
    for (const auto& r : output.mod_results) {
      const auto& m = r.metrics;
      std::printf(
          "seed %llu: served %.1f%%, rs %.1f%%, sigma_pass %.2f, dist %.1f km, "
          "detour %.2f%%\n",
          static_cast<unsigned long long>(r.seed), m.served_pct, m.rs_pct, m.sigma_pass,
          m.mean_distance_km, m.detour_ratio_pct);
    }
  }
  std::printf("results written to %s\n", config.out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Confidence-gated experience transfer experiments"};
  app.require_subcommand(1);

  CommonFlags f_train, f_transfer, f_baseline, f_eval, f_metrics;
  std::string baseline_mode = "no_transfer";
  std::string metrics_trace, metrics_out = "out";

  auto* train = app.add_subcommand("train-source",
                                   "train a source agent, record its labelled buffer");
  add_common(train, f_train);

  auto* transfer = app.add_subcommand(
      "transfer", "filter/sample a buffer, pre-train and train a target agent");
  add_common(transfer, f_transfer);

  auto* baseline = app.add_subcommand("baseline", "comparison strategies");
  add_common(baseline, f_baseline);
  baseline->add_option("--mode", baseline_mode,
                       "no_transfer | policy_transfer | advice_begin | "
                       "mistake_correction | eps_decay");

  auto* evaluate = app.add_subcommand("evaluate", "run a frozen checkpoint");
  add_common(evaluate, f_eval);

  auto* metrics = app.add_subcommand("metrics",
                                     "recompute fleet metrics from an event trace");
  metrics->add_option("--trace", metrics_trace, "JSONL event trace file")->required();
  metrics->add_option("--out", metrics_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return execute(assemble(f_train, Mode::train_source));
    if (transfer->parsed()) return execute(assemble(f_transfer, Mode::transfer));
    if (baseline->parsed())
      return execute(assemble(f_baseline, parse_mode(baseline_mode)));
    if (evaluate->parsed()) return execute(assemble(f_eval, Mode::evaluate_only));
    if (metrics->parsed()) {
      const auto trace = trace_from_jsonl(metrics_trace);
      const auto m = compute_mod_metrics(trace);
      std::filesystem::create_directories(metrics_out);
      write_mod_metrics_csv(metrics_out + "/mod_metrics.csv", {{"from_trace", m}});
      write_waiting_times_csv(metrics_out + "/waiting_times.csv", m);
      std::printf("served %.1f%%, rs %.1f%%, sigma_pass %.2f, dist %.1f km, detour %.2f%%\n",
                  m.served_pct, m.rs_pct, m.sigma_pass, m.mean_distance_km,
                  m.detour_ratio_pct);
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
