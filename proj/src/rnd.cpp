#include "xfer/rnd.hpp"

#include <stdexcept>

#include "xfer/net/batch.hpp"

namespace xfer::rnd {

RndPair::RndPair(int state_dim, RndConfig config, std::uint64_t seed)
    : target_({state_dim, config.hidden, config.rnd_size}, seed),
      predictor_({state_dim, config.hidden, config.rnd_size}, seed + 0x9e3779b97f4a7c15ULL),
      opt_(net::AdamState::for_net(predictor_, config.learning_rate)) {}

double RndPair::uncertainty(std::span<const double> state) const {
  const Vec t = target_.evaluate(state);
  const Vec p = predictor_.evaluate(state);
  double sum = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double d = p[i] - t[i];
    sum += d * d;
  }
  return sum / static_cast<double>(t.size());
}

double RndPair::update(std::span<const Vec> states) {
  if (states.empty()) throw std::invalid_argument("rnd update: empty batch");

  std::vector<Vec> target_out;
  net::batch_forward(target_, states, target_out);

  const double inv_n = 1.0 / static_cast<double>(states.size());
  const double inv_d = 1.0 / static_cast<double>(rnd_size());
  net::GradientTape tape = predictor_.make_tape();
  const double loss = net::batch_backward(
      predictor_, states,
      [&](std::size_t i, std::span<const double> out, std::span<double> gout) {
        const Vec& t = target_out[i];
        double sum = 0.0;
        for (std::size_t d = 0; d < out.size(); ++d) {
          const double diff = out[d] - t[d];
          sum += diff * diff;
          gout[d] = 2.0 * diff * inv_d * inv_n;
        }
        return sum * inv_d * inv_n;
      },
      tape);

  net::adam_step(predictor_, tape, opt_);
  return loss;
}

void RndPair::load_nets(net::DenseNet target, net::DenseNet predictor) {
  if (target.layer_sizes() != predictor.layer_sizes())
    throw std::invalid_argument("RndPair: target/predictor shape mismatch");
  target_ = std::move(target);
  predictor_ = std::move(predictor);
  opt_ = net::AdamState::for_net(predictor_, opt_.learning_rate);
}

}  // namespace xfer::rnd
