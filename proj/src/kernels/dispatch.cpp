#include <atomic>
#include <cstddef>
#include <vector>

#include "common.hpp"
#include "kernels/kernels.hpp"

namespace gridood::kernels {

const Ops& scalar_ops();
#if defined(__x86_64__) || defined(_M_X64)
const Ops& avx2_ops();
#endif
#if defined(__aarch64__)
const Ops& neon_ops();
#endif

bool available(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return true;
    case Backend::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Backend::Neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const Ops& get(Backend b) {
  if (!available(b)) {
    throw UsageError("kernel backend not available on this CPU");
  }
  switch (b) {
    case Backend::Scalar:
      return scalar_ops();
#if defined(__x86_64__) || defined(_M_X64)
    case Backend::Avx2:
      return avx2_ops();
#endif
#if defined(__aarch64__)
    case Backend::Neon:
      return neon_ops();
#endif
    default:
      return scalar_ops();
  }
}

Backend detect_best() {
  if (available(Backend::Avx2)) {
    return Backend::Avx2;
  }
  if (available(Backend::Neon)) {
    return Backend::Neon;
  }
  return Backend::Scalar;
}

namespace {
std::atomic<const Ops*> g_active{nullptr};
std::atomic<Backend> g_backend{Backend::Scalar};
}  // namespace

void select(Backend b) {
  const Ops& ops = get(b);
  g_active.store(&ops, std::memory_order_release);
  g_backend.store(b, std::memory_order_release);
}

void select_auto() { select(detect_best()); }

Backend active_backend() {
  if (g_active.load(std::memory_order_acquire) == nullptr) {
    select_auto();
  }
  return g_backend.load(std::memory_order_acquire);
}

const Ops& active() {
  const Ops* ops = g_active.load(std::memory_order_acquire);
  if (ops == nullptr) {
    select_auto();
    ops = g_active.load(std::memory_order_acquire);
  }
  return *ops;
}

Backend backend_from_name(const std::string& name) {
  if (name == "scalar") return Backend::Scalar;
  if (name == "avx2") return Backend::Avx2;
  if (name == "neon") return Backend::Neon;
  if (name == "auto") return detect_best();
  throw ConfigError("unknown simd backend '" + name +
                    "' (expected auto, scalar, avx2 or neon)");
}

void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const double* a,
             const double* b, double* c) {
  active().gemm_nn(m, n, k, a, b, c);
}

namespace {

// Grow-only scratch for the transposed operand; one per thread so parallel
// training runs never share it.
std::vector<double>& scratch() {
  thread_local std::vector<double> buf;
  return buf;
}

void transpose(std::size_t rows, std::size_t cols, const double* src,
               double* dst) {
  // src is rows x cols, dst becomes cols x rows.
  for (std::size_t r = 0; r < rows; ++r) {
    const double* s = src + r * cols;
    for (std::size_t cidx = 0; cidx < cols; ++cidx) {
      dst[cidx * rows + r] = s[cidx];
    }
  }
}

}  // namespace

void gemm_tn(std::size_t m, std::size_t n, std::size_t k, const double* a,
             const double* b, double* c) {
  // a is [K,M]; transpose into [M,K] then run the plain kernel.
  std::vector<double>& buf = scratch();
  if (buf.size() < m * k) buf.resize(m * k);
  transpose(k, m, a, buf.data());
  active().gemm_nn(m, n, k, buf.data(), b, c);
}

void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const double* a,
             const double* b, double* c) {
  // b is [N,K]; transpose into [K,N] then run the plain kernel.
  std::vector<double>& buf = scratch();
  if (buf.size() < n * k) buf.resize(n * k);
  transpose(n, k, b, buf.data());
  active().gemm_nn(m, n, k, a, buf.data(), c);
}

}  // namespace gridood::kernels
