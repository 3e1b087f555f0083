#include "xfer/net/serialize.hpp"

#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace xfer::net {

nlohmann::json to_json(const DenseNet& net) {
  nlohmann::json j;
  j["layer_sizes"] = net.layer_sizes();
  auto& jw = j["weights"] = nlohmann::json::array();
  for (const auto& w : net.weights()) jw.push_back(w.data);
  auto& jb = j["biases"] = nlohmann::json::array();
  for (const auto& b : net.biases()) jb.push_back(b);
  return j;
}

DenseNet net_from_json(const nlohmann::json& j) {
  const auto sizes = j.at("layer_sizes").get<std::vector<int>>();
  DenseNet net(sizes, 0);
  const auto& jw = j.at("weights");
  const auto& jb = j.at("biases");
  if (jw.size() != net.weights().size() || jb.size() != net.biases().size())
    throw std::runtime_error("net_from_json: layer count mismatch");
  for (std::size_t l = 0; l < net.weights().size(); ++l) {
    auto w = jw[l].get<Vec>();
    if (w.size() != net.weights()[l].data.size())
      throw std::runtime_error("net_from_json: weight shape mismatch");
    net.weights()[l].data = std::move(w);
    auto b = jb[l].get<Vec>();
    if (b.size() != net.biases()[l].size())
      throw std::runtime_error("net_from_json: bias shape mismatch");
    net.biases()[l] = std::move(b);
  }
  return net;
}

void save_net(const DenseNet& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_net: cannot open " + path);
  out << to_json(net).dump();
  if (!out) throw std::runtime_error("save_net: write failed for " + path);
}

DenseNet load_net(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_net: cannot open " + path);
  nlohmann::json j;
  in >> j;
  return net_from_json(j);
}

}  // namespace xfer::net
