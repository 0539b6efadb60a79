// NEON variants for aarch64. Baseline on that architecture, so no runtime
// feature probe is needed beyond the compile guard.

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cmath>
#include <cstddef>

#include "kernels/kernels.hpp"

namespace gridood::kernels {
namespace {

void gemm_nn_neon(std::size_t m, std::size_t n, std::size_t k, const double* a,
                  const double* b, double* c) {
  constexpr std::size_t MR = 4;
  constexpr std::size_t NR = 4;  // 2 q-registers of f64x2

  std::size_t i = 0;
  for (; i + MR <= m; i += MR) {
    const double* a0 = a + (i + 0) * k;
    const double* a1 = a + (i + 1) * k;
    const double* a2 = a + (i + 2) * k;
    const double* a3 = a + (i + 3) * k;
    std::size_t j = 0;
    for (; j + NR <= n; j += NR) {
      float64x2_t c00 = vld1q_f64(c + (i + 0) * n + j);
      float64x2_t c01 = vld1q_f64(c + (i + 0) * n + j + 2);
      float64x2_t c10 = vld1q_f64(c + (i + 1) * n + j);
      float64x2_t c11 = vld1q_f64(c + (i + 1) * n + j + 2);
      float64x2_t c20 = vld1q_f64(c + (i + 2) * n + j);
      float64x2_t c21 = vld1q_f64(c + (i + 2) * n + j + 2);
      float64x2_t c30 = vld1q_f64(c + (i + 3) * n + j);
      float64x2_t c31 = vld1q_f64(c + (i + 3) * n + j + 2);
      for (std::size_t kk = 0; kk < k; ++kk) {
        const float64x2_t b0 = vld1q_f64(b + kk * n + j);
        const float64x2_t b1 = vld1q_f64(b + kk * n + j + 2);
        const float64x2_t av0 = vdupq_n_f64(a0[kk]);
        c00 = vfmaq_f64(c00, av0, b0);
        c01 = vfmaq_f64(c01, av0, b1);
        const float64x2_t av1 = vdupq_n_f64(a1[kk]);
        c10 = vfmaq_f64(c10, av1, b0);
        c11 = vfmaq_f64(c11, av1, b1);
        const float64x2_t av2 = vdupq_n_f64(a2[kk]);
        c20 = vfmaq_f64(c20, av2, b0);
        c21 = vfmaq_f64(c21, av2, b1);
        const float64x2_t av3 = vdupq_n_f64(a3[kk]);
        c30 = vfmaq_f64(c30, av3, b0);
        c31 = vfmaq_f64(c31, av3, b1);
      }
      vst1q_f64(c + (i + 0) * n + j, c00);
      vst1q_f64(c + (i + 0) * n + j + 2, c01);
      vst1q_f64(c + (i + 1) * n + j, c10);
      vst1q_f64(c + (i + 1) * n + j + 2, c11);
      vst1q_f64(c + (i + 2) * n + j, c20);
      vst1q_f64(c + (i + 2) * n + j + 2, c21);
      vst1q_f64(c + (i + 3) * n + j, c30);
      vst1q_f64(c + (i + 3) * n + j + 2, c31);
    }
    for (; j < n; ++j) {
      double s0 = c[(i + 0) * n + j];
      double s1 = c[(i + 1) * n + j];
      double s2 = c[(i + 2) * n + j];
      double s3 = c[(i + 3) * n + j];
      for (std::size_t kk = 0; kk < k; ++kk) {
        const double bv = b[kk * n + j];
        s0 = std::fma(a0[kk], bv, s0);
        s1 = std::fma(a1[kk], bv, s1);
        s2 = std::fma(a2[kk], bv, s2);
        s3 = std::fma(a3[kk], bv, s3);
      }
      c[(i + 0) * n + j] = s0;
      c[(i + 1) * n + j] = s1;
      c[(i + 2) * n + j] = s2;
      c[(i + 3) * n + j] = s3;
    }
  }
  for (; i < m; ++i) {
    const double* arow = a + i * k;
    double* crow = c + i * n;
    std::size_t j = 0;
    for (; j + NR <= n; j += NR) {
      float64x2_t c0 = vld1q_f64(crow + j);
      float64x2_t c1 = vld1q_f64(crow + j + 2);
      for (std::size_t kk = 0; kk < k; ++kk) {
        const float64x2_t av = vdupq_n_f64(arow[kk]);
        c0 = vfmaq_f64(c0, av, vld1q_f64(b + kk * n + j));
        c1 = vfmaq_f64(c1, av, vld1q_f64(b + kk * n + j + 2));
      }
      vst1q_f64(crow + j, c0);
      vst1q_f64(crow + j + 2, c1);
    }
    for (; j < n; ++j) {
      double s = crow[j];
      for (std::size_t kk = 0; kk < k; ++kk) {
        s = std::fma(arow[kk], b[kk * n + j], s);
      }
      crow[j] = s;
    }
  }
}

void leaky_relu_fwd_neon(const double* x, double* y, std::size_t n,
                         double slope) {
  const float64x2_t sl = vdupq_n_f64(slope);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t xv = vld1q_f64(x + i);
    vst1q_f64(y + i, vmaxq_f64(xv, vmulq_f64(sl, xv)));
  }
  for (; i < n; ++i) {
    y[i] = x[i] > 0.0 ? x[i] : slope * x[i];
  }
}

void leaky_relu_bwd_neon(const double* x, const double* dy, double* dx,
                         std::size_t n, double slope) {
  const float64x2_t sl = vdupq_n_f64(slope);
  const float64x2_t one = vdupq_n_f64(1.0);
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t xv = vld1q_f64(x + i);
    const uint64x2_t mask = vcgeq_f64(xv, zero);
    const float64x2_t factor = vbslq_f64(mask, one, sl);
    const float64x2_t dv = vmulq_f64(vld1q_f64(dy + i), factor);
    vst1q_f64(dx + i, vaddq_f64(vld1q_f64(dx + i), dv));
  }
  for (; i < n; ++i) {
    dx[i] += dy[i] * (x[i] >= 0.0 ? 1.0 : slope);
  }
}

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t av = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), av, vld1q_f64(x + i)));
  }
  for (; i < n; ++i) {
    y[i] = std::fma(a, x[i], y[i]);
  }
}

void adam_update_neon(double* p, const double* g, double* m, double* v,
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

const Ops& neon_ops() {
  static const Ops ops{
      "neon",           gemm_nn_neon, leaky_relu_fwd_neon,
      leaky_relu_bwd_neon, axpy_neon, adam_update_neon,
  };
  return ops;
}

}  // namespace gridood::kernels

#endif  // __aarch64__
