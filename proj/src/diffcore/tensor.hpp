#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace gridood::diff {

// Dense row-major tensor of 64-bit reals. Handle semantics: copying a
// Tensor shares the underlying buffer, which is what the tape needs to
// accumulate gradients into leaves that outlive a single graph.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(std::vector<std::size_t> shape,
                      bool requires_grad = false);
  static Tensor full(std::vector<std::size_t> shape, double value,
                     bool requires_grad = false);
  static Tensor from_data(std::vector<std::size_t> shape,
                          std::vector<double> data,
                          bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const std::vector<std::size_t>& shape() const;
  std::size_t size() const;
  std::size_t dim(std::size_t axis) const;
  bool requires_grad() const;

  std::span<const double> values() const;
  std::span<double> values_mut();
  std::span<const double> grad() const;
  std::span<double> grad_mut();
  void zero_grad();

  double item() const;  // requires size() == 1

  // Stable identity of the underlying buffer (for is-same-tensor checks).
  const void* id() const { return node_.get(); }

 private:
  struct Node {
    std::vector<std::size_t> shape;
    std::vector<double> value;
    std::vector<double> grad;  // sized like value iff requires_grad
    bool requires_grad = false;
  };
  std::shared_ptr<Node> node_;

  explicit Tensor(std::shared_ptr<Node> node) : node_(std::move(node)) {}
  Node& node() const;
};

std::size_t shape_product(const std::vector<std::size_t>& shape);

// Throws NumericError naming `what` if any element is NaN or infinite.
void check_finite(std::span<const double> data, const std::string& what);

}  // namespace gridood::diff
