#include <atomic>
#include <cstdlib>
#include <string>

#include "kernels_impl.hpp"
#include "semrel/error.hpp"
#include "semrel/simd.hpp"

namespace semrel::simd {

namespace {

constexpr KernelTable kScalarTable{Backend::kScalar, "scalar", &scalar::dot,
                                   &scalar::squared_l2, &scalar::axpy};
#if defined(SEMREL_HAVE_AVX2)
constexpr KernelTable kAvx2Table{Backend::kAvx2, "avx2", &avx2::dot, &avx2::squared_l2,
                                 &avx2::axpy};
#endif
#if defined(SEMREL_HAVE_NEON)
constexpr KernelTable kNeonTable{Backend::kNeon, "neon", &neon::dot, &neon::squared_l2,
                                 &neon::axpy};
#endif

const KernelTable* initial_table() {
  Backend backend = best_supported();
  if (const char* env = std::getenv("SEMREL_SIMD"); env != nullptr && *env != '\0') {
    backend = parse_backend(env);
  }
  return &table(backend);
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{initial_table()};
  return slot;
}

}  // namespace

bool supported(Backend backend) {
  switch (backend) {
    case Backend::kScalar:
      return true;
    case Backend::kAvx2:
#if defined(SEMREL_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Backend::kNeon:
#if defined(SEMREL_HAVE_NEON)
      return true;  // mandatory on AArch64
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Backend backend) {
  if (!supported(backend)) {
    throw ConfigError("SIMD backend '" + std::string(backend_name(backend)) +
                      "' is not available on this machine");
  }
  switch (backend) {
#if defined(SEMREL_HAVE_AVX2)
    case Backend::kAvx2:
      return kAvx2Table;
#endif
#if defined(SEMREL_HAVE_NEON)
    case Backend::kNeon:
      return kNeonTable;
#endif
    default:
      return kScalarTable;
  }
}

const KernelTable& active() { return *active_slot().load(std::memory_order_acquire); }

void select(Backend backend) {
  active_slot().store(&table(backend), std::memory_order_release);
}

Backend best_supported() {
  if (supported(Backend::kAvx2)) return Backend::kAvx2;
  if (supported(Backend::kNeon)) return Backend::kNeon;
  return Backend::kScalar;
}

Backend parse_backend(std::string_view name) {
  if (name == "scalar") return Backend::kScalar;
  if (name == "avx2") return Backend::kAvx2;
  if (name == "neon") return Backend::kNeon;
  throw ConfigError("unknown SIMD backend '" + std::string(name) + "'");
}

std::string_view backend_name(Backend backend) {
  switch (backend) {
    case Backend::kScalar:
      return "scalar";
    case Backend::kAvx2:
      return "avx2";
    case Backend::kNeon:
      return "neon";
  }
  return "unknown";
}

}  // namespace semrel::simd
