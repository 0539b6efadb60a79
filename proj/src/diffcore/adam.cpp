#include "diffcore/adam.hpp"

#include <cmath>

#include "common.hpp"
#include "kernels/kernels.hpp"

namespace gridood::diff {

void AdamState::step(std::span<NamedTensor> params) {
  t_ += 1;
  const double bc1 = 1.0 / (1.0 - std::pow(cfg_.beta1, static_cast<double>(t_)));
  const double bc2 = 1.0 / (1.0 - std::pow(cfg_.beta2, static_cast<double>(t_)));
  for (NamedTensor& p : params) {
    Tensor& t = p.tensor;
    if (!t.requires_grad()) {
      throw UsageError("adam: parameter '" + p.name + "' has no gradient");
    }
    for (double gv : t.grad()) {
      if (!std::isfinite(gv)) {
        throw NumericError("adam: non-finite gradient for parameter '" +
                           p.name + "'");
      }
    }
    Slot& slot = slots_[p.name];
    if (slot.m.empty()) {
      slot.m.assign(t.size(), 0.0);
      slot.v.assign(t.size(), 0.0);
    } else if (slot.m.size() != t.size()) {
      throw DimensionError("adam: state shape mismatch for parameter '" +
                           p.name + "'");
    }
    kernels::active().adam_update(t.values_mut().data(), t.grad().data(),
                                  slot.m.data(), slot.v.data(), t.size(),
                                  cfg_.lr, cfg_.beta1, cfg_.beta2, cfg_.eps,
                                  bc1, bc2);
  }
}

}  // namespace gridood::diff
