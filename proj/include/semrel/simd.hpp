#pragma once

// Vector arithmetic kernels with a scalar reference implementation and
// SIMD variants (AVX2+FMA on x86-64, NEON on AArch64) chosen at runtime.
//
// The scalar path is the reference: every SIMD variant is tested against it.
// Reductions in the SIMD paths use several accumulators, so results differ
// from the scalar path by rounding only. For a fixed backend every kernel is
// deterministic.
//
// The backend is chosen on first use: the best one the CPU supports, unless
// the SEMREL_SIMD environment variable names one ("scalar", "avx2", "neon").

#include <cstddef>
#include <span>
#include <string_view>

namespace semrel::simd {

enum class Backend { kScalar, kAvx2, kNeon };

struct KernelTable {
  Backend backend;
  const char* name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*squared_l2)(const double* a, const double* b, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
};

// True when the backend was compiled in and the running CPU supports it.
bool supported(Backend backend);

// Kernel table for a specific backend; throws ConfigError if unsupported.
const KernelTable& table(Backend backend);

// Currently active table.
const KernelTable& active();

// Override the active backend (tests, benchmarking). Throws if unsupported.
void select(Backend backend);

Backend best_supported();
Backend parse_backend(std::string_view name);
std::string_view backend_name(Backend backend);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline double squared_l2(std::span<const double> a, std::span<const double> b) {
  return active().squared_l2(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace semrel::simd
