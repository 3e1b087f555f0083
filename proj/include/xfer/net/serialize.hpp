#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "xfer/net/dense_net.hpp"

namespace xfer::net {

/// JSON snapshot: {"layer_sizes": [...], "weights": [[row-major]...],
/// "biases": [[...]...]}. Doubles round-trip losslessly.
nlohmann::json to_json(const DenseNet& net);
DenseNet net_from_json(const nlohmann::json& j);

void save_net(const DenseNet& net, const std::string& path);
DenseNet load_net(const std::string& path);

}  // namespace xfer::net
