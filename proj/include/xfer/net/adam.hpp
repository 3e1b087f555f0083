#pragma once

#include "xfer/net/dense_net.hpp"

namespace xfer::net {

/// Adam optimizer state for one DenseNet. Moment accumulators mirror the
/// parameter shapes; `step` counts completed updates.
struct AdamState {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  long long step = 0;
  std::vector<Matrix> m_weights, v_weights;
  std::vector<Vec> m_biases, v_biases;

  static AdamState for_net(const DenseNet& net, double learning_rate);
};

/// One Adam update with the given gradient tape. Rejects non-finite
/// gradients (throws, parameters untouched).
void adam_step(DenseNet& net, const GradientTape& tape, AdamState& state);

}  // namespace xfer::net
