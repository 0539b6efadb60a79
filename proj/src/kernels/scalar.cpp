#include <cmath>
#include <cstddef>

#include "kernels/kernels.hpp"

namespace gridood::kernels {
namespace {

// Reference kernels. Saxpy-form GEMM: for each output row, stream rows of B
// scaled by the matching A element. K is the sequential reduction axis.
void gemm_nn_scalar(std::size_t m, std::size_t n, std::size_t k,
                    const double* a, const double* b, double* c) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = a + i * k;
    double* crow = c + i * n;
    for (std::size_t kk = 0; kk < k; ++kk) {
      const double av = arow[kk];
      const double* brow = b + kk * n;
      for (std::size_t j = 0; j < n; ++j) {
        crow[j] += av * brow[j];
      }
    }
  }
}

void leaky_relu_fwd_scalar(const double* x, double* y, std::size_t n,
                           double slope) {
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = x[i] > 0.0 ? x[i] : slope * x[i];
  }
}

void leaky_relu_bwd_scalar(const double* x, const double* dy, double* dx,
                           std::size_t n, double slope) {
  for (std::size_t i = 0; i < n; ++i) {
    dx[i] += dy[i] * (x[i] >= 0.0 ? 1.0 : slope);
  }
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    y[i] += a * x[i];
  }
}

void adam_update_scalar(double* p, const double* g, double* m, double* v,
                        std::size_t n, double lr, double beta1, double beta2,
                        double eps, double bc1, double bc2) {
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * (g[i] * g[i]);
    const double mhat = m[i] * bc1;
    const double vhat = v[i] * bc2;
    p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops{
      "scalar",           gemm_nn_scalar, leaky_relu_fwd_scalar,
      leaky_relu_bwd_scalar, axpy_scalar, adam_update_scalar,
  };
  return ops;
}

}  // namespace gridood::kernels
