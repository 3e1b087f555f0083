#pragma once

#include <optional>
#include <string>

#include "xfer/net/dense_net.hpp"
#include "xfer/rnd.hpp"

namespace xfer::harness {

/// Policy/value (and optionally RND) parameter snapshot in one JSON file.
struct Checkpoint {
  net::DenseNet policy;
  net::DenseNet value;
  std::optional<net::DenseNet> rnd_target;
  std::optional<net::DenseNet> rnd_predictor;

  bool has_rnd() const { return rnd_target.has_value() && rnd_predictor.has_value(); }
};

void save_checkpoint(const std::string& path, const net::DenseNet& policy,
                     const net::DenseNet& value, const rnd::RndPair* rnd = nullptr);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace xfer::harness
