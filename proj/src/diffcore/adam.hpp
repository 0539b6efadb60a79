#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "diffcore/tensor.hpp"

namespace gridood::diff {

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam over one parameter group. Moment buffers are keyed by
// parameter name; the step counter increases by exactly one per step().
class AdamState {
 public:
  explicit AdamState(AdamConfig cfg) : cfg_(cfg) {}

  // Applies one update in place using each parameter's accumulated gradient.
  // A NaN/Inf gradient aborts with an error naming the parameter.
  void step(std::span<NamedTensor> params);

  std::uint64_t step_count() const { return t_; }
  double learning_rate() const { return cfg_.lr; }
  void set_learning_rate(double lr) { cfg_.lr = lr; }
  const AdamConfig& config() const { return cfg_; }

 private:
  struct Slot {
    std::vector<double> m, v;
  };
  AdamConfig cfg_;
  std::uint64_t t_ = 0;
  std::map<std::string, Slot> slots_;
};

}  // namespace gridood::diff
