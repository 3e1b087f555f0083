#include "xfer/harness/checkpoint.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "xfer/net/serialize.hpp"

namespace xfer::harness {

void save_checkpoint(const std::string& path, const net::DenseNet& policy,
                     const net::DenseNet& value, const rnd::RndPair* rnd) {
  nlohmann::json j;
  j["format"] = "xfer-checkpoint";
  j["version"] = 1;
  j["policy"] = net::to_json(policy);
  j["value"] = net::to_json(value);
  if (rnd) {
    j["rnd_target"] = net::to_json(rnd->target());
    j["rnd_predictor"] = net::to_json(rnd->predictor());
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
  out << j.dump();
  if (!out) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
  nlohmann::json j;
  in >> j;
  Checkpoint c{net::net_from_json(j.at("policy")), net::net_from_json(j.at("value")),
               std::nullopt, std::nullopt};
  if (j.contains("rnd_target")) c.rnd_target = net::net_from_json(j.at("rnd_target"));
  if (j.contains("rnd_predictor"))
    c.rnd_predictor = net::net_from_json(j.at("rnd_predictor"));
  return c;
}

}  // namespace xfer::harness
