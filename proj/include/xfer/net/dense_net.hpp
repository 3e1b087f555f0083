#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace xfer::net {

using Vec = std::vector<double>;

/// Dense row-major matrix, rows = outputs, cols = inputs.
struct Matrix {
  int rows = 0;
  int cols = 0;
  Vec data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

  double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
};

/// Accumulated parameter gradients, shape-congruent with a DenseNet.
struct GradientTape {
  std::vector<Matrix> weight_grads;
  std::vector<Vec> bias_grads;

  void zero();
  void add(const GradientTape& other);
  void scale(double factor);
  bool is_finite() const;
};

/// Per-call scratch space for forward/backward passes. Reusable; one per
/// thread when evaluating batches in parallel.
struct Workspace {
  std::vector<Vec> activations;  // activations[0] = input, back() = output
  std::vector<Vec> preacts;      // pre-activation per non-input layer
};

/// Fully connected feedforward net with tanh hidden units and a linear
/// output layer. Plain value object: copyable, no hidden sharing.
class DenseNet {
 public:
  DenseNet() = default;

  /// layer_sizes = {input, hidden..., output}; at least two entries.
  /// Weights drawn uniform in +-sqrt(6/(fan_in+fan_out)), biases zero.
  DenseNet(std::vector<int> layer_sizes, std::uint64_t seed);

  int input_size() const { return sizes_.empty() ? 0 : sizes_.front(); }
  int output_size() const { return sizes_.empty() ? 0 : sizes_.back(); }
  const std::vector<int>& layer_sizes() const { return sizes_; }
  int transform_count() const { return static_cast<int>(weights_.size()); }

  /// Forward pass that caches activations for a subsequent backward().
  const Vec& forward(std::span<const double> input);

  /// Accumulates dLoss/dparams into `tape` given dLoss/doutput for the
  /// input most recently passed to forward(). Throws if no pass is cached.
  void backward(std::span<const double> output_grad, GradientTape& tape) const;

  /// Stateless evaluation (no cache mutation).
  Vec evaluate(std::span<const double> input) const;

  GradientTape make_tape() const;
  bool parameters_finite() const;
  std::size_t parameter_count() const;

  std::vector<Matrix>& weights() { return weights_; }
  const std::vector<Matrix>& weights() const { return weights_; }
  std::vector<Vec>& biases() { return biases_; }
  const std::vector<Vec>& biases() const { return biases_; }

 private:
  std::vector<int> sizes_;
  std::vector<Matrix> weights_;  // weights_[l]: sizes_[l+1] x sizes_[l]
  std::vector<Vec> biases_;      // biases_[l]: sizes_[l+1]
  Workspace cache_;
  bool cached_ = false;

  friend void forward_into(const DenseNet&, std::span<const double>, Workspace&);
  friend void backward_from(const DenseNet&, const Workspace&,
                            std::span<const double>, GradientTape&);
};

/// Forward pass writing activations into an external workspace.
void forward_into(const DenseNet& net, std::span<const double> input, Workspace& ws);

/// Backward pass reading a workspace previously filled by forward_into for
/// the same net. Accumulates into `tape`.
void backward_from(const DenseNet& net, const Workspace& ws,
                   std::span<const double> output_grad, GradientTape& tape);

}  // namespace xfer::net
