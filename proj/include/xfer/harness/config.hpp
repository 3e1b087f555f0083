#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "xfer/baselines.hpp"
#include "xfer/env/gridworld.hpp"
#include "xfer/env/rideshare/demand.hpp"
#include "xfer/env/rideshare/world.hpp"
#include "xfer/ppo.hpp"
#include "xfer/rnd.hpp"
#include "xfer/transfer.hpp"

namespace xfer::harness {

enum class Scenario { predator_prey, mod };

enum class Mode {
  train_source,
  transfer,
  no_transfer,
  policy_transfer,
  advice_begin,
  mistake_correction,
  eps_decay,
  evaluate_only,  // CLI `evaluate` verb: load a checkpoint, run, no updates
};

Scenario parse_scenario(const std::string& text);
Mode parse_mode(const std::string& text);
std::string to_string(Scenario s);
std::string to_string(Mode m);

struct PpSettings {
  long episodes = 1000;
  double capture_window = 0.2;
  std::vector<int> hidden{64};
  ppo::PpoConfig ppo{0.99, 0.2, 10, 500, 1e-3};
  rnd::RndConfig rnd{64, 128, 3e-4};
  gridworld::GridConfig grid;
};

struct ModSettings {
  int eval_vehicles = 20;
  long eval_requests = 1000;
  long training_requests = 3000;
  int rounds = 6;
  int vehicles_per_round = 10;
  double capture_window = 0.4;
  std::vector<int> hidden{64, 64};
  ppo::PpoConfig ppo{0.999, 0.2, 10, 32, 1e-4};
  rnd::RndConfig rnd{64, 128, 1e-4};
  mod::ModConfig world;
  mod::DemandConfig demand;
  int lattice_width = 20;
  int lattice_height = 20;
  double edge_meters = 100.0;
  double speed_mps = 8.0;
};

struct ExperimentConfig {
  int version = 1;
  Scenario scenario = Scenario::predator_prey;
  Mode mode = Mode::no_transfer;
  std::string profile = "ci";
  std::vector<std::uint64_t> seeds{1};
  transfer::ThresholdSpec threshold = transfer::ThresholdSpec::mean();
  long budget = 5000;
  int pretrain_epochs = 10;
  std::string buffer_path;
  std::string checkpoint_path;
  std::string out_dir = "out";
  bool emit_trace = false;
  baselines::EpsDecayConfig eps_decay;
  PpSettings pp;
  ModSettings mod;
};

/// Scenario/profile defaults. "ci" keeps desk-scale sizes; "full" restores
/// the headline configuration (3000 episodes, 4x128 nets, RND 1024,
/// 200 vehicles, 9663+30000 requests).
ExperimentConfig default_config(Scenario scenario, const std::string& profile);

/// Loads a versioned JSON config file: scenario/profile select the default
/// block, every other present key overrides it.
ExperimentConfig load_config(const std::string& path);
void apply_overrides(ExperimentConfig& config, const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& config);

/// Mode-specific requirements (e.g. transfer needs a buffer path). Throws
/// with a descriptive message.
void validate(const ExperimentConfig& config);

}  // namespace xfer::harness
