#include "xfer/net/batch.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace xfer::net {

namespace {

// Chunk size is fixed so the summation tree does not depend on the number
// of threads: per-chunk partials accumulate in sample order, then merge in
// chunk order.
constexpr std::size_t kChunk = 64;

double run_chunk(const DenseNet& net, std::span<const Vec> inputs,
                 const SampleLossFn& loss, std::size_t begin, std::size_t end,
                 Workspace& ws, Vec& grad_buf, GradientTape& tape) {
  double loss_sum = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    forward_into(net, inputs[i], ws);
    const Vec& out = ws.activations.back();
    grad_buf.assign(out.size(), 0.0);
    loss_sum += loss(i, out, grad_buf);
    backward_from(net, ws, grad_buf, tape);
  }
  return loss_sum;
}

}  // namespace

double batch_backward(const DenseNet& net, std::span<const Vec> inputs,
                      const SampleLossFn& loss, GradientTape& tape) {
  const std::size_t n = inputs.size();
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  if (chunks <= 1) return batch_backward_reference(net, inputs, loss, tape);

  std::vector<GradientTape> partial_tapes(chunks, net.make_tape());
  std::vector<double> partial_losses(chunks, 0.0);

#pragma omp parallel
  {
    Workspace ws;
    Vec grad_buf;
#pragma omp for schedule(dynamic)
    for (long long c = 0; c < static_cast<long long>(chunks); ++c) {
      const std::size_t begin = static_cast<std::size_t>(c) * kChunk;
      const std::size_t end = std::min(n, begin + kChunk);
      partial_losses[c] =
          run_chunk(net, inputs, loss, begin, end, ws, grad_buf, partial_tapes[c]);
    }
  }

  double loss_sum = 0.0;
  for (std::size_t c = 0; c < chunks; ++c) {
    loss_sum += partial_losses[c];
    tape.add(partial_tapes[c]);
  }
  return loss_sum;
}

double batch_backward_reference(const DenseNet& net, std::span<const Vec> inputs,
                                const SampleLossFn& loss, GradientTape& tape) {
  Workspace ws;
  Vec grad_buf;
  return run_chunk(net, inputs, loss, 0, inputs.size(), ws, grad_buf, tape);
}

void batch_forward(const DenseNet& net, std::span<const Vec> inputs,
                   std::vector<Vec>& outputs) {
  const std::size_t n = inputs.size();
  outputs.resize(n);
#pragma omp parallel
  {
    Workspace ws;
#pragma omp for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
      forward_into(net, inputs[i], ws);
      outputs[i] = ws.activations.back();
    }
  }
}

void batch_forward_reference(const DenseNet& net, std::span<const Vec> inputs,
                             std::vector<Vec>& outputs) {
  const std::size_t n = inputs.size();
  outputs.resize(n);
  Workspace ws;
  for (std::size_t i = 0; i < n; ++i) {
    forward_into(net, inputs[i], ws);
    outputs[i] = ws.activations.back();
  }
}

}  // namespace xfer::net
