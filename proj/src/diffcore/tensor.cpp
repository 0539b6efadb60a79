#include "diffcore/tensor.hpp"

#include <cmath>

#include "common.hpp"

namespace gridood::diff {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) {
    n *= d;
  }
  return n;
}

Tensor Tensor::zeros(std::vector<std::size_t> shape, bool requires_grad) {
  for (std::size_t d : shape) {
    if (d == 0) {
      throw DimensionError("tensor extents must be positive");
    }
  }
  auto node = std::make_shared<Node>();
  const std::size_t n = shape_product(shape);
  node->shape = std::move(shape);
  node->value.assign(n, 0.0);
  node->requires_grad = requires_grad;
  if (requires_grad) {
    node->grad.assign(n, 0.0);
  }
  return Tensor(std::move(node));
}

Tensor Tensor::full(std::vector<std::size_t> shape, double value,
                    bool requires_grad) {
  Tensor t = zeros(std::move(shape), requires_grad);
  for (double& x : t.values_mut()) {
    x = value;
  }
  return t;
}

Tensor Tensor::from_data(std::vector<std::size_t> shape,
                         std::vector<double> data, bool requires_grad) {
  if (shape_product(shape) != data.size()) {
    throw DimensionError("tensor data length does not match shape product");
  }
  Tensor t = zeros(std::move(shape), requires_grad);
  std::copy(data.begin(), data.end(), t.values_mut().begin());
  return t;
}

Tensor Tensor::scalar(double value, bool requires_grad) {
  return from_data({1}, {value}, requires_grad);
}

Tensor::Node& Tensor::node() const {
  if (!node_) {
    throw UsageError("operation on an undefined tensor");
  }
  return *node_;
}

const std::vector<std::size_t>& Tensor::shape() const { return node().shape; }

std::size_t Tensor::size() const { return node().value.size(); }

std::size_t Tensor::dim(std::size_t axis) const {
  const auto& s = node().shape;
  if (axis >= s.size()) {
    throw DimensionError("tensor axis out of range");
  }
  return s[axis];
}

bool Tensor::requires_grad() const { return node().requires_grad; }

std::span<const double> Tensor::values() const { return node().value; }

std::span<double> Tensor::values_mut() { return node().value; }

std::span<const double> Tensor::grad() const {
  Node& n = node();
  if (!n.requires_grad) {
    throw UsageError("grad() on a tensor without requires_grad");
  }
  return n.grad;
}

std::span<double> Tensor::grad_mut() {
  Node& n = node();
  if (!n.requires_grad) {
    throw UsageError("grad() on a tensor without requires_grad");
  }
  return n.grad;
}

void Tensor::zero_grad() {
  Node& n = node();
  if (n.requires_grad) {
    std::fill(n.grad.begin(), n.grad.end(), 0.0);
  }
}

double Tensor::item() const {
  if (size() != 1) {
    throw UsageError("item() requires a single-element tensor");
  }
  return values()[0];
}

void check_finite(std::span<const double> data, const std::string& what) {
  for (double x : data) {
    if (!std::isfinite(x)) {
      throw NumericError("non-finite value in " + what);
    }
  }
}

}  // namespace gridood::diff
