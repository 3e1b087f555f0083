#pragma once

#include "xfer/net/adam.hpp"
#include "xfer/net/dense_net.hpp"

namespace xfer::rnd {

using net::Vec;

struct RndConfig {
  int hidden = 256;
  int rnd_size = 1024;
  // Kept below the task learning rates so the predictor loss decays
  // smoothly; the uncertainty signal is a label, not a policy.
  double learning_rate = 3e-4;
};

/// Random Network Distillation confidence estimator: a frozen random target
/// net and a trained predictor of the same shape. Uncertainty of a state is
/// the mean squared difference of the two outputs.
class RndPair {
 public:
  RndPair(int state_dim, RndConfig config, std::uint64_t seed);

  /// u(state) >= 0; zero iff the predictor reproduces the target exactly.
  double uncertainty(std::span<const double> state) const;

  /// One optimizer step on the predictor over the batch; returns the mean
  /// squared discrepancy before the step. The target never changes.
  double update(std::span<const Vec> states);

  int state_dim() const { return target_.input_size(); }
  int rnd_size() const { return target_.output_size(); }
  const net::DenseNet& target() const { return target_; }
  const net::DenseNet& predictor() const { return predictor_; }

  /// Checkpoint restore; predictor optimizer moments reset.
  void load_nets(net::DenseNet target, net::DenseNet predictor);

 private:
  net::DenseNet target_;
  net::DenseNet predictor_;
  net::AdamState opt_;
};

}  // namespace xfer::rnd
