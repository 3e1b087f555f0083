#include "xfer/harness/config.hpp"

#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace xfer::harness {

Scenario parse_scenario(const std::string& text) {
  if (text == "predator_prey" || text == "pp") return Scenario::predator_prey;
  if (text == "mod") return Scenario::mod;
  throw std::invalid_argument("unknown scenario '" + text +
                              "' (expected predator_prey or mod)");
}

Mode parse_mode(const std::string& text) {
  if (text == "train_source") return Mode::train_source;
  if (text == "transfer") return Mode::transfer;
  if (text == "no_transfer") return Mode::no_transfer;
  if (text == "policy_transfer") return Mode::policy_transfer;
  if (text == "advice_begin") return Mode::advice_begin;
  if (text == "mistake_correction") return Mode::mistake_correction;
  if (text == "eps_decay") return Mode::eps_decay;
  if (text == "evaluate") return Mode::evaluate_only;
  throw std::invalid_argument("unknown mode '" + text + "'");
}

std::string to_string(Scenario s) {
  return s == Scenario::predator_prey ? "predator_prey" : "mod";
}

std::string to_string(Mode m) {
  switch (m) {
    case Mode::train_source: return "train_source";
    case Mode::transfer: return "transfer";
    case Mode::no_transfer: return "no_transfer";
    case Mode::policy_transfer: return "policy_transfer";
    case Mode::advice_begin: return "advice_begin";
    case Mode::mistake_correction: return "mistake_correction";
    case Mode::eps_decay: return "eps_decay";
    case Mode::evaluate_only: return "evaluate";
  }
  return "?";
}

ExperimentConfig default_config(Scenario scenario, const std::string& profile) {
  if (profile != "ci" && profile != "full")
    throw std::invalid_argument("unknown profile '" + profile + "' (ci or full)");
  ExperimentConfig c;
  c.scenario = scenario;
  c.profile = profile;
  if (profile == "full") {
    c.pp.episodes = 3000;
    c.pp.rnd = rnd::RndConfig{256, 1024, 3e-4};
    c.mod.eval_vehicles = 200;
    c.mod.eval_requests = 9663;
    c.mod.training_requests = 30000;
    c.mod.hidden = {128, 128, 128, 128};
    c.mod.rnd = rnd::RndConfig{256, 1024, 1e-4};
  }
  return c;
}

namespace {

template <typename T>
void maybe(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void apply_ppo(const nlohmann::json& j, ppo::PpoConfig& c) {
  maybe(j, "gamma", c.gamma);
  maybe(j, "clip_eps", c.clip_eps);
  maybe(j, "epochs", c.epochs);
  maybe(j, "update_iter", c.update_iter);
  maybe(j, "learning_rate", c.learning_rate);
}

void apply_rnd(const nlohmann::json& j, rnd::RndConfig& c) {
  maybe(j, "hidden", c.hidden);
  maybe(j, "rnd_size", c.rnd_size);
  maybe(j, "learning_rate", c.learning_rate);
}

nlohmann::json ppo_json(const ppo::PpoConfig& c) {
  return {{"gamma", c.gamma},
          {"clip_eps", c.clip_eps},
          {"epochs", c.epochs},
          {"update_iter", c.update_iter},
          {"learning_rate", c.learning_rate}};
}

nlohmann::json rnd_json(const rnd::RndConfig& c) {
  return {{"hidden", c.hidden},
          {"rnd_size", c.rnd_size},
          {"learning_rate", c.learning_rate}};
}

}  // namespace

void apply_overrides(ExperimentConfig& c, const nlohmann::json& j) {
  if (j.contains("mode")) c.mode = parse_mode(j.at("mode").get<std::string>());
  maybe(j, "seeds", c.seeds);
  if (j.contains("threshold")) {
    const auto& t = j.at("threshold");
    c.threshold = t.is_number()
                      ? transfer::ThresholdSpec::fixed(t.get<double>())
                      : transfer::ThresholdSpec::parse(t.get<std::string>());
  }
  maybe(j, "budget", c.budget);
  maybe(j, "pretrain_epochs", c.pretrain_epochs);
  maybe(j, "buffer", c.buffer_path);
  maybe(j, "checkpoint", c.checkpoint_path);
  maybe(j, "out", c.out_dir);
  maybe(j, "emit_trace", c.emit_trace);
  if (j.contains("eps_decay")) {
    const auto& e = j.at("eps_decay");
    maybe(e, "eps0", c.eps_decay.eps0);
    maybe(e, "decay", c.eps_decay.decay);
  }
  if (j.contains("pp")) {
    const auto& p = j.at("pp");
    maybe(p, "episodes", c.pp.episodes);
    maybe(p, "capture_window", c.pp.capture_window);
    maybe(p, "hidden", c.pp.hidden);
    if (p.contains("ppo")) apply_ppo(p.at("ppo"), c.pp.ppo);
    if (p.contains("rnd")) apply_rnd(p.at("rnd"), c.pp.rnd);
    auto& g = c.pp.grid;
    maybe(p, "grid_size", g.grid_size);
    maybe(p, "prey_count", g.prey_count);
    maybe(p, "max_steps", g.max_steps);
  }
  if (j.contains("mod")) {
    const auto& m = j.at("mod");
    maybe(m, "eval_vehicles", c.mod.eval_vehicles);
    maybe(m, "eval_requests", c.mod.eval_requests);
    maybe(m, "training_requests", c.mod.training_requests);
    maybe(m, "rounds", c.mod.rounds);
    maybe(m, "vehicles_per_round", c.mod.vehicles_per_round);
    maybe(m, "capture_window", c.mod.capture_window);
    maybe(m, "hidden", c.mod.hidden);
    if (m.contains("ppo")) apply_ppo(m.at("ppo"), c.mod.ppo);
    if (m.contains("rnd")) apply_rnd(m.at("rnd"), c.mod.rnd);
    auto& w = c.mod.world;
    maybe(m, "park_duration_s", w.park_duration_s);
    maybe(m, "noop_tick_s", w.noop_tick_s);
    maybe(m, "reeval_cooldown_s", w.reeval_cooldown_s);
    maybe(m, "max_sim_time_s", w.max_sim_time_s);
    auto& d = c.mod.demand;
    maybe(m, "demand_window_s", d.window_s);
    maybe(m, "request_expiry_s", d.expiry_s);
    maybe(m, "hot_zone_prob", d.hot_zone_prob);
    maybe(m, "lattice_width", c.mod.lattice_width);
    maybe(m, "lattice_height", c.mod.lattice_height);
    maybe(m, "edge_meters", c.mod.edge_meters);
    maybe(m, "speed_mps", c.mod.speed_mps);
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_config: cannot open " + path);
  nlohmann::json j;
  in >> j;
  const int version = j.value("version", 1);
  if (version != 1)
    throw std::runtime_error("load_config: unsupported config version " +
                             std::to_string(version));
  const auto scenario = parse_scenario(j.value("scenario", "predator_prey"));
  const auto profile = j.value("profile", std::string("ci"));
  ExperimentConfig c = default_config(scenario, profile);
  apply_overrides(c, j);
  return c;
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["version"] = c.version;
  j["scenario"] = to_string(c.scenario);
  j["mode"] = to_string(c.mode);
  j["profile"] = c.profile;
  j["seeds"] = c.seeds;
  if (c.threshold.kind == transfer::ThresholdSpec::Kind::fixed)
    j["threshold"] = c.threshold.value;
  else
    j["threshold"] = c.threshold.describe();
  j["budget"] = c.budget;
  j["pretrain_epochs"] = c.pretrain_epochs;
  j["buffer"] = c.buffer_path;
  j["checkpoint"] = c.checkpoint_path;
  j["out"] = c.out_dir;
  j["emit_trace"] = c.emit_trace;
  j["eps_decay"] = {{"eps0", c.eps_decay.eps0}, {"decay", c.eps_decay.decay}};
  j["pp"] = {{"episodes", c.pp.episodes},
             {"capture_window", c.pp.capture_window},
             {"hidden", c.pp.hidden},
             {"ppo", ppo_json(c.pp.ppo)},
             {"rnd", rnd_json(c.pp.rnd)},
             {"grid_size", c.pp.grid.grid_size},
             {"prey_count", c.pp.grid.prey_count},
             {"max_steps", c.pp.grid.max_steps}};
  j["mod"] = {{"eval_vehicles", c.mod.eval_vehicles},
              {"eval_requests", c.mod.eval_requests},
              {"training_requests", c.mod.training_requests},
              {"rounds", c.mod.rounds},
              {"vehicles_per_round", c.mod.vehicles_per_round},
              {"capture_window", c.mod.capture_window},
              {"hidden", c.mod.hidden},
              {"ppo", ppo_json(c.mod.ppo)},
              {"rnd", rnd_json(c.mod.rnd)},
              {"park_duration_s", c.mod.world.park_duration_s},
              {"noop_tick_s", c.mod.world.noop_tick_s},
              {"reeval_cooldown_s", c.mod.world.reeval_cooldown_s},
              {"max_sim_time_s", c.mod.world.max_sim_time_s},
              {"demand_window_s", c.mod.demand.window_s},
              {"request_expiry_s", c.mod.demand.expiry_s},
              {"hot_zone_prob", c.mod.demand.hot_zone_prob},
              {"lattice_width", c.mod.lattice_width},
              {"lattice_height", c.mod.lattice_height},
              {"edge_meters", c.mod.edge_meters},
              {"speed_mps", c.mod.speed_mps}};
  return j;
}

void validate(const ExperimentConfig& c) {
  if (c.seeds.empty()) throw std::invalid_argument("config: seeds must be non-empty");
  if (c.budget < 0) throw std::invalid_argument("config: budget must be >= 0");
  switch (c.mode) {
    case Mode::transfer:
      if (c.buffer_path.empty())
        throw std::invalid_argument("config: transfer mode requires a buffer path");
      break;
    case Mode::policy_transfer:
      if (c.scenario != Scenario::mod)
        throw std::invalid_argument(
            "config: policy_transfer is defined for the mod scenario");
      if (c.checkpoint_path.empty())
        throw std::invalid_argument(
            "config: policy_transfer mode requires a checkpoint path");
      break;
    case Mode::advice_begin:
    case Mode::mistake_correction:
    case Mode::eps_decay:
      if (c.scenario != Scenario::predator_prey)
        throw std::invalid_argument(
            "config: advising baselines run on the predator_prey scenario");
      if (c.checkpoint_path.empty())
        throw std::invalid_argument(
            "config: advising baselines require a teacher checkpoint path");
      break;
    case Mode::evaluate_only:
      if (c.checkpoint_path.empty())
        throw std::invalid_argument("config: evaluate requires a checkpoint path");
      break;
    case Mode::train_source:
    case Mode::no_transfer:
      break;
  }
}

}  // namespace xfer::harness
