#include "diffcore/graph.hpp"

#include "common.hpp"

namespace gridood::diff {

void Graph::backward(Tensor loss) {
  if (loss.size() != 1) {
    throw UsageError("backward() requires a scalar loss");
  }
  if (backward_done_) {
    throw UsageError("backward() already ran on this graph; reset() first");
  }
  backward_done_ = true;
  if (!loss.requires_grad()) {
    // No differentiable leaf feeds the loss; nothing to propagate.
    return;
  }
  loss.grad_mut()[0] += 1.0;
  for (auto it = tape_.rbegin(); it != tape_.rend(); ++it) {
    (*it)();
  }
}

}  // namespace gridood::diff
