#pragma once

#include <functional>
#include <vector>

#include "diffcore/tensor.hpp"

namespace gridood::diff {

// Tape of executed operations. Record order equals execution order; the
// backward pass replays it in reverse exactly once, accumulating gradients
// additively into every requires_grad tensor it reaches.
class Graph {
 public:
  explicit Graph(bool recording = true) : recording_(recording) {}

  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  bool recording() const { return recording_; }
  std::size_t num_ops() const { return tape_.size(); }

  void record(std::function<void()> backward_step) {
    tape_.push_back(std::move(backward_step));
  }

  // Seeds d(loss)/d(loss) = 1 and replays the tape. Throws UsageError for a
  // non-scalar root or if backward already ran on this tape.
  void backward(Tensor loss);

  // Clears the tape so the graph can record a fresh computation.
  void reset() {
    tape_.clear();
    backward_done_ = false;
  }

 private:
  std::vector<std::function<void()>> tape_;
  bool recording_;
  bool backward_done_ = false;
};

}  // namespace gridood::diff
