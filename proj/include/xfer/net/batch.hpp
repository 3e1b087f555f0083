#pragma once

#include <functional>

#include "xfer/net/dense_net.hpp"

namespace xfer::net {

/// Per-sample loss hook for batch_backward. Receives the sample index and
/// the net output for that sample, writes dLoss/doutput into `output_grad`
/// (already sized and zeroed) and returns the sample's loss contribution.
/// Must be safe to call concurrently for distinct indices.
using SampleLossFn = std::function<double(
    std::size_t index, std::span<const double> output, std::span<double> output_grad)>;

/// Sums per-sample losses and parameter gradients over `inputs`.
///
/// OpenMP-parallel over fixed-size chunks; chunk partials are merged in
/// chunk order, so the result is bit-identical for any thread count.
double batch_backward(const DenseNet& net, std::span<const Vec> inputs,
                      const SampleLossFn& loss, GradientTape& tape);

/// Serial reference for batch_backward: one plain sample-at-a-time loop.
/// Kept for tests and the kernel benchmark.
double batch_backward_reference(const DenseNet& net, std::span<const Vec> inputs,
                                const SampleLossFn& loss, GradientTape& tape);

/// Evaluates the net on every input. Parallel; outputs land at the
/// matching index regardless of scheduling.
void batch_forward(const DenseNet& net, std::span<const Vec> inputs,
                   std::vector<Vec>& outputs);

/// Serial reference for batch_forward.
void batch_forward_reference(const DenseNet& net, std::span<const Vec> inputs,
                             std::vector<Vec>& outputs);

}  // namespace xfer::net
