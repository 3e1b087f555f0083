#include "xfer/net/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace xfer::net {

AdamState AdamState::for_net(const DenseNet& net, double learning_rate) {
  if (learning_rate <= 0.0)
    throw std::invalid_argument("AdamState: learning rate must be positive");
  AdamState s;
  s.learning_rate = learning_rate;
  for (const auto& w : net.weights()) {
    s.m_weights.emplace_back(w.rows, w.cols);
    s.v_weights.emplace_back(w.rows, w.cols);
  }
  for (const auto& b : net.biases()) {
    s.m_biases.emplace_back(b.size(), 0.0);
    s.v_biases.emplace_back(b.size(), 0.0);
  }
  return s;
}

void adam_step(DenseNet& net, const GradientTape& tape, AdamState& state) {
  if (tape.weight_grads.size() != net.weights().size())
    throw std::invalid_argument("adam_step: tape shape mismatch");
  if (!tape.is_finite())
    throw std::runtime_error("adam_step: non-finite gradient rejected");

  state.step += 1;
  const double b1 = state.beta1, b2 = state.beta2;
  const double bias1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double bias2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  const double lr = state.learning_rate;
  const double eps = state.epsilon;

  auto update = [&](double& param, double grad, double& m, double& v) {
    m = b1 * m + (1.0 - b1) * grad;
    v = b2 * v + (1.0 - b2) * grad * grad;
    const double mhat = m / bias1;
    const double vhat = v / bias2;
    param -= lr * mhat / (std::sqrt(vhat) + eps);
  };

  for (std::size_t l = 0; l < net.weights().size(); ++l) {
    auto& w = net.weights()[l].data;
    const auto& g = tape.weight_grads[l].data;
    auto& m = state.m_weights[l].data;
    auto& v = state.v_weights[l].data;
    if (g.size() != w.size())
      throw std::invalid_argument("adam_step: weight gradient shape mismatch");
    for (std::size_t i = 0; i < w.size(); ++i) update(w[i], g[i], m[i], v[i]);

    auto& b = net.biases()[l];
    const auto& gb = tape.bias_grads[l];
    auto& mb = state.m_biases[l];
    auto& vb = state.v_biases[l];
    for (std::size_t i = 0; i < b.size(); ++i) update(b[i], gb[i], mb[i], vb[i]);
  }
}

}  // namespace xfer::net
