#pragma once

#include <cstddef>
#include <string>

namespace gridood::kernels {

// Arithmetic inner loops used by the tensor engine. Every routine exists as
// a scalar reference implementation plus SIMD variants; the active variant
// is chosen at runtime from CPU capabilities and can be forced for tests or
// via the CLI. All variants accumulate along K in the same (sequential)
// order, so results differ between backends only by per-element rounding,
// never by reduction reordering. Within one backend results are bit-stable.
enum class Backend { Scalar, Avx2, Neon };

struct Ops {
  const char* name;

  // C[M,N] += A[M,K] * B[K,N]; row-major, non-aliasing.
  void (*gemm_nn)(std::size_t m, std::size_t n, std::size_t k, const double* a,
                  const double* b, double* c);

  // y[i] = x[i] > 0 ? x[i] : slope * x[i]
  void (*leaky_relu_fwd)(const double* x, double* y, std::size_t n,
                         double slope);
  // dx[i] += dy[i] * (x[i] >= 0 ? 1 : slope)
  void (*leaky_relu_bwd)(const double* x, const double* dy, double* dx,
                         std::size_t n, double slope);

  // y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);

  // Bias-corrected Adam update, in place. bc1 = 1/(1-beta1^t),
  // bc2 = 1/(1-beta2^t) are precomputed by the caller.
  void (*adam_update)(double* p, const double* g, double* m, double* v,
                      std::size_t n, double lr, double beta1, double beta2,
                      double eps, double bc1, double bc2);
};

bool available(Backend b);
const Ops& get(Backend b);  // throws UsageError if unavailable on this CPU
Backend detect_best();

// Selection is process-global and must be done before spawning worker
// threads; active() is a plain read afterwards.
void select(Backend b);
void select_auto();
Backend active_backend();
const Ops& active();

Backend backend_from_name(const std::string& name);  // "scalar"/"avx2"/"neon"/"auto"

// Transposed-operand products, implemented once on top of gemm_nn with an
// explicit transpose into thread-local scratch.
//   gemm_tn: C[M,N] += A^T * B with A stored [K,M]
//   gemm_nt: C[M,N] += A * B^T with B stored [N,K]
void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const double* a,
             const double* b, double* c);
void gemm_tn(std::size_t m, std::size_t n, std::size_t k, const double* a,
             const double* b, double* c);
void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const double* a,
             const double* b, double* c);

}  // namespace gridood::kernels
