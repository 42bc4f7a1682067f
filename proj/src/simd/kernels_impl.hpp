#pragma once

#include <cstddef>

namespace semrel::simd::scalar {
double dot(const double* a, const double* b, std::size_t n);
double squared_l2(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace semrel::simd::scalar

#if defined(SEMREL_HAVE_AVX2)
namespace semrel::simd::avx2 {
double dot(const double* a, const double* b, std::size_t n);
double squared_l2(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace semrel::simd::avx2
#endif

#if defined(SEMREL_HAVE_NEON)
namespace semrel::simd::neon {
double dot(const double* a, const double* b, std::size_t n);
double squared_l2(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace semrel::simd::neon
#endif
