#include "xfer/net/dense_net.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace xfer::net {

void GradientTape::zero() {
  for (auto& m : weight_grads) std::fill(m.data.begin(), m.data.end(), 0.0);
  for (auto& b : bias_grads) std::fill(b.begin(), b.end(), 0.0);
}

void GradientTape::add(const GradientTape& other) {
  if (other.weight_grads.size() != weight_grads.size())
    throw std::invalid_argument("GradientTape::add: layer count mismatch");
  for (std::size_t l = 0; l < weight_grads.size(); ++l) {
    auto& dst = weight_grads[l].data;
    const auto& src = other.weight_grads[l].data;
    if (dst.size() != src.size())
      throw std::invalid_argument("GradientTape::add: shape mismatch");
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    auto& db = bias_grads[l];
    const auto& sb = other.bias_grads[l];
    for (std::size_t i = 0; i < db.size(); ++i) db[i] += sb[i];
  }
}

void GradientTape::scale(double factor) {
  for (auto& m : weight_grads)
    for (auto& v : m.data) v *= factor;
  for (auto& b : bias_grads)
    for (auto& v : b) v *= factor;
}

bool GradientTape::is_finite() const {
  for (const auto& m : weight_grads)
    for (double v : m.data)
      if (!std::isfinite(v)) return false;
  for (const auto& b : bias_grads)
    for (double v : b)
      if (!std::isfinite(v)) return false;
  return true;
}

DenseNet::DenseNet(std::vector<int> layer_sizes, std::uint64_t seed)
    : sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 2)
    throw std::invalid_argument("DenseNet: need at least input and output sizes");
  for (int s : sizes_)
    if (s <= 0) throw std::invalid_argument("DenseNet: layer sizes must be positive");

  std::mt19937_64 rng(seed);
  weights_.reserve(sizes_.size() - 1);
  biases_.reserve(sizes_.size() - 1);
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const int fan_in = sizes_[l];
    const int fan_out = sizes_[l + 1];
    Matrix w(fan_out, fan_in);
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (auto& v : w.data) v = dist(rng);
    weights_.push_back(std::move(w));
    biases_.emplace_back(fan_out, 0.0);
  }
}

void forward_into(const DenseNet& net, std::span<const double> input, Workspace& ws) {
  if (static_cast<int>(input.size()) != net.input_size())
    throw std::invalid_argument("forward: input dimension mismatch");
  const std::size_t transforms = net.weights_.size();
  ws.activations.resize(transforms + 1);
  ws.preacts.resize(transforms);
  ws.activations[0].assign(input.begin(), input.end());

  for (std::size_t l = 0; l < transforms; ++l) {
    const Matrix& w = net.weights_[l];
    const Vec& b = net.biases_[l];
    const Vec& in = ws.activations[l];
    Vec& z = ws.preacts[l];
    z.resize(w.rows);
    for (int r = 0; r < w.rows; ++r) {
      const double* row = &w.data[static_cast<std::size_t>(r) * w.cols];
      double sum = b[r];
      for (int c = 0; c < w.cols; ++c) sum += row[c] * in[c];
      z[r] = sum;
    }
    Vec& out = ws.activations[l + 1];
    out.resize(w.rows);
    const bool last = (l + 1 == transforms);
    if (last) {
      out = z;
    } else {
      for (int r = 0; r < w.rows; ++r) out[r] = std::tanh(z[r]);
    }
  }
}

void backward_from(const DenseNet& net, const Workspace& ws,
                   std::span<const double> output_grad, GradientTape& tape) {
  const std::size_t transforms = net.weights_.size();
  if (ws.activations.size() != transforms + 1)
    throw std::logic_error("backward: workspace not filled by forward");
  if (static_cast<int>(output_grad.size()) != net.output_size())
    throw std::invalid_argument("backward: output gradient dimension mismatch");
  if (tape.weight_grads.size() != transforms)
    throw std::invalid_argument("backward: tape shape mismatch");

  // Output layer is linear, so the first delta is the loss gradient itself.
  Vec delta(output_grad.begin(), output_grad.end());
  for (std::size_t l = transforms; l-- > 0;) {
    const Matrix& w = net.weights_[l];
    const Vec& in = ws.activations[l];
    Matrix& dw = tape.weight_grads[l];
    Vec& db = tape.bias_grads[l];
    for (int r = 0; r < w.rows; ++r) {
      const double d = delta[r];
      db[r] += d;
      double* drow = &dw.data[static_cast<std::size_t>(r) * w.cols];
      for (int c = 0; c < w.cols; ++c) drow[c] += d * in[c];
    }
    if (l == 0) break;
    Vec prev(w.cols, 0.0);
    for (int r = 0; r < w.rows; ++r) {
      const double d = delta[r];
      const double* row = &w.data[static_cast<std::size_t>(r) * w.cols];
      for (int c = 0; c < w.cols; ++c) prev[c] += row[c] * d;
    }
    // Chain through the tanh of the previous (hidden) layer.
    const Vec& act = ws.activations[l];
    for (int c = 0; c < w.cols; ++c) prev[c] *= 1.0 - act[c] * act[c];
    delta = std::move(prev);
  }
}

const Vec& DenseNet::forward(std::span<const double> input) {
  forward_into(*this, input, cache_);
  cached_ = true;
  return cache_.activations.back();
}

void DenseNet::backward(std::span<const double> output_grad, GradientTape& tape) const {
  if (!cached_)
    throw std::logic_error("DenseNet::backward called before forward");
  backward_from(*this, cache_, output_grad, tape);
}

Vec DenseNet::evaluate(std::span<const double> input) const {
  Workspace ws;
  forward_into(*this, input, ws);
  return std::move(ws.activations.back());
}

GradientTape DenseNet::make_tape() const {
  GradientTape tape;
  tape.weight_grads.reserve(weights_.size());
  tape.bias_grads.reserve(biases_.size());
  for (const auto& w : weights_) tape.weight_grads.emplace_back(w.rows, w.cols);
  for (const auto& b : biases_) tape.bias_grads.emplace_back(b.size(), 0.0);
  return tape;
}

bool DenseNet::parameters_finite() const {
  for (const auto& w : weights_)
    for (double v : w.data)
      if (!std::isfinite(v)) return false;
  for (const auto& b : biases_)
    for (double v : b)
      if (!std::isfinite(v)) return false;
  return true;
}

std::size_t DenseNet::parameter_count() const {
  std::size_t n = 0;
  for (const auto& w : weights_) n += w.data.size();
  for (const auto& b : biases_) n += b.size();
  return n;
}

}  // namespace xfer::net
