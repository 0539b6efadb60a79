#pragma once

#include "diffcore/graph.hpp"
#include "diffcore/tensor.hpp"

namespace gridood::diff {

// Differentiable operations. Each computes its forward result eagerly,
// verifies the output is finite, and (when the graph is recording and some
// input requires gradients) pushes a backward step onto the tape.

// input [C_in,H,W], kernel [C_out,C_in,kh,kw] with kh,kw odd, bias [C_out].
// Cross-correlation with the given stride and zero padding.
Tensor conv2d(Graph& g, const Tensor& input, const Tensor& kernel,
              const Tensor& bias, int stride, int padding);

// Elementwise max(x, slope*x); slope must lie in (0,1). The subgradient at
// zero uses the positive branch (derivative 1).
Tensor leaky_relu(Graph& g, const Tensor& x, double slope);

// Numerically stable logistic function, elementwise.
Tensor sigmoid(Graph& g, const Tensor& x);

// Binary cross-entropy from logits, summed over all elements. Computed in
// the fused logit-space form, so it stays finite for any representable
// logit. Targets must lie in [0,1].
Tensor bce_sum(Graph& g, const Tensor& logits, const Tensor& targets);

// Same, with a fixed per-element weight factor. Weights are treated as
// constants (requires_grad weights are rejected).
Tensor bce_sum_weighted(Graph& g, const Tensor& logits, const Tensor& targets,
                        const Tensor& weights);

Tensor add(Graph& g, const Tensor& a, const Tensor& b);
Tensor mul(Graph& g, const Tensor& a, const Tensor& b);
Tensor scale(Graph& g, const Tensor& x, double s);
Tensor sum_all(Graph& g, const Tensor& x);

// out[o] = bias[o] + sum_i weight[o,i] * x[i]
Tensor linear(Graph& g, const Tensor& x, const Tensor& weight,
              const Tensor& bias);

// [C,H,W] -> [C]: mean over the spatial axes.
Tensor spatial_mean(Graph& g, const Tensor& x);

// [C,H,W] -> [W,H,C] permutation (detection-head layout).
Tensor chw_to_whc(Graph& g, const Tensor& x);

double stable_sigmoid(double x);

}  // namespace gridood::diff
