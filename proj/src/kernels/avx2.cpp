// AVX2+FMA variants. Compiled with -mavx2 -mfma on x86-64 only; the
// dispatcher never hands these out unless the CPU reports both features.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cstddef>

#include "kernels/kernels.hpp"

namespace gridood::kernels {
namespace {

// 4x8 register tile; K stays the innermost sequential reduction so the
// accumulation order matches the scalar reference element-for-element.
void gemm_nn_avx2(std::size_t m, std::size_t n, std::size_t k, const double* a,
                  const double* b, double* c) {
  constexpr std::size_t MR = 4;
  constexpr std::size_t NR = 8;

  std::size_t i = 0;
  for (; i + MR <= m; i += MR) {
    const double* a0 = a + (i + 0) * k;
    const double* a1 = a + (i + 1) * k;
    const double* a2 = a + (i + 2) * k;
    const double* a3 = a + (i + 3) * k;
    std::size_t j = 0;
    for (; j + NR <= n; j += NR) {
      __m256d c00 = _mm256_loadu_pd(c + (i + 0) * n + j);
      __m256d c01 = _mm256_loadu_pd(c + (i + 0) * n + j + 4);
      __m256d c10 = _mm256_loadu_pd(c + (i + 1) * n + j);
      __m256d c11 = _mm256_loadu_pd(c + (i + 1) * n + j + 4);
      __m256d c20 = _mm256_loadu_pd(c + (i + 2) * n + j);
      __m256d c21 = _mm256_loadu_pd(c + (i + 2) * n + j + 4);
      __m256d c30 = _mm256_loadu_pd(c + (i + 3) * n + j);
      __m256d c31 = _mm256_loadu_pd(c + (i + 3) * n + j + 4);
      for (std::size_t kk = 0; kk < k; ++kk) {
        const __m256d b0 = _mm256_loadu_pd(b + kk * n + j);
        const __m256d b1 = _mm256_loadu_pd(b + kk * n + j + 4);
        const __m256d av0 = _mm256_broadcast_sd(a0 + kk);
        c00 = _mm256_fmadd_pd(av0, b0, c00);
        c01 = _mm256_fmadd_pd(av0, b1, c01);
        const __m256d av1 = _mm256_broadcast_sd(a1 + kk);
        c10 = _mm256_fmadd_pd(av1, b0, c10);
        c11 = _mm256_fmadd_pd(av1, b1, c11);
        const __m256d av2 = _mm256_broadcast_sd(a2 + kk);
        c20 = _mm256_fmadd_pd(av2, b0, c20);
        c21 = _mm256_fmadd_pd(av2, b1, c21);
        const __m256d av3 = _mm256_broadcast_sd(a3 + kk);
        c30 = _mm256_fmadd_pd(av3, b0, c30);
        c31 = _mm256_fmadd_pd(av3, b1, c31);
      }
      _mm256_storeu_pd(c + (i + 0) * n + j, c00);
      _mm256_storeu_pd(c + (i + 0) * n + j + 4, c01);
      _mm256_storeu_pd(c + (i + 1) * n + j, c10);
      _mm256_storeu_pd(c + (i + 1) * n + j + 4, c11);
      _mm256_storeu_pd(c + (i + 2) * n + j, c20);
      _mm256_storeu_pd(c + (i + 2) * n + j + 4, c21);
      _mm256_storeu_pd(c + (i + 3) * n + j, c30);
      _mm256_storeu_pd(c + (i + 3) * n + j + 4, c31);
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
      __m256d cv0 = _mm256_loadu_pd(crow + j);
      __m256d cv1 = _mm256_loadu_pd(crow + j + 4);
      for (std::size_t kk = 0; kk < k; ++kk) {
        const __m256d av = _mm256_broadcast_sd(arow + kk);
        cv0 = _mm256_fmadd_pd(av, _mm256_loadu_pd(b + kk * n + j), cv0);
        cv1 = _mm256_fmadd_pd(av, _mm256_loadu_pd(b + kk * n + j + 4), cv1);
      }
      _mm256_storeu_pd(crow + j, cv0);
      _mm256_storeu_pd(crow + j + 4, cv1);
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

void leaky_relu_fwd_avx2(const double* x, double* y, std::size_t n,
                         double slope) {
  const __m256d sl = _mm256_set1_pd(slope);
  std::size_t i = 0;
  // max(x, slope*x) equals the branch form for slope in (0,1).
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    _mm256_storeu_pd(y + i, _mm256_max_pd(xv, _mm256_mul_pd(sl, xv)));
  }
  for (; i < n; ++i) {
    y[i] = x[i] > 0.0 ? x[i] : slope * x[i];
  }
}

void leaky_relu_bwd_avx2(const double* x, const double* dy, double* dx,
                         std::size_t n, double slope) {
  const __m256d sl = _mm256_set1_pd(slope);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    const __m256d mask = _mm256_cmp_pd(xv, zero, _CMP_GE_OQ);
    const __m256d factor = _mm256_blendv_pd(sl, one, mask);
    const __m256d dv = _mm256_mul_pd(_mm256_loadu_pd(dy + i), factor);
    _mm256_storeu_pd(dx + i, _mm256_add_pd(_mm256_loadu_pd(dx + i), dv));
  }
  for (; i < n; ++i) {
    dx[i] += dy[i] * (x[i] >= 0.0 ? 1.0 : slope);
  }
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d yv =
        _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(y + i, yv);
  }
  for (; i < n; ++i) {
    y[i] = std::fma(a, x[i], y[i]);
  }
}

void adam_update_avx2(double* p, const double* g, double* m, double* v,
                      std::size_t n, double lr, double beta1, double beta2,
                      double eps, double bc1, double bc2) {
  const __m256d b1 = _mm256_set1_pd(beta1);
  const __m256d b2 = _mm256_set1_pd(beta2);
  const __m256d omb1 = _mm256_set1_pd(1.0 - beta1);
  const __m256d omb2 = _mm256_set1_pd(1.0 - beta2);
  const __m256d lrv = _mm256_set1_pd(lr);
  const __m256d epsv = _mm256_set1_pd(eps);
  const __m256d bc1v = _mm256_set1_pd(bc1);
  const __m256d bc2v = _mm256_set1_pd(bc2);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d gv = _mm256_loadu_pd(g + i);
    const __m256d mv =
        _mm256_add_pd(_mm256_mul_pd(b1, _mm256_loadu_pd(m + i)),
                      _mm256_mul_pd(omb1, gv));
    const __m256d vv =
        _mm256_add_pd(_mm256_mul_pd(b2, _mm256_loadu_pd(v + i)),
                      _mm256_mul_pd(omb2, _mm256_mul_pd(gv, gv)));
    _mm256_storeu_pd(m + i, mv);
    _mm256_storeu_pd(v + i, vv);
    const __m256d mhat = _mm256_mul_pd(mv, bc1v);
    const __m256d vhat = _mm256_mul_pd(vv, bc2v);
    const __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(vhat), epsv);
    const __m256d step = _mm256_div_pd(_mm256_mul_pd(lrv, mhat), denom);
    _mm256_storeu_pd(p + i, _mm256_sub_pd(_mm256_loadu_pd(p + i), step));
  }
  for (; i < n; ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * (g[i] * g[i]);
    const double mhat = m[i] * bc1;
    const double vhat = v[i] * bc2;
    p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

}  // namespace

const Ops& avx2_ops() {
  static const Ops ops{
      "avx2",           gemm_nn_avx2, leaky_relu_fwd_avx2,
      leaky_relu_bwd_avx2, axpy_avx2, adam_update_avx2,
  };
  return ops;
}

}  // namespace gridood::kernels

#endif  // x86-64
