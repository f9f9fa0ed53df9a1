#include <atomic>
#include <cstdlib>
#include <string_view>

#include "ccil/simd/kernels.hpp"

namespace ccil::simd {

#if defined(CCIL_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
}  // namespace avx2
#endif
#if defined(CCIL_HAVE_NEON)
namespace neon {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
}  // namespace neon
#endif

namespace {

constexpr KernelTable kScalar{Isa::kScalar, "scalar", &scalar::dot, &scalar::axpy, &scalar::scale};
#if defined(CCIL_HAVE_AVX2)
constexpr KernelTable kAvx2{Isa::kAvx2, "avx2", &avx2::dot, &avx2::axpy, &avx2::scale};
#endif
#if defined(CCIL_HAVE_NEON)
constexpr KernelTable kNeon{Isa::kNeon, "neon", &neon::dot, &neon::axpy, &neon::scale};
#endif

const KernelTable* detect() {
  if (const char* env = std::getenv("CCIL_SIMD"); env != nullptr && std::string_view(env) == "scalar") {
    return &kScalar;
  }
  if (const KernelTable* t = table_for(Isa::kAvx2)) return t;
  if (const KernelTable* t = table_for(Isa::kNeon)) return t;
  return &kScalar;
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{detect()};
  return table;
}

}  // namespace

const KernelTable* table_for(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return &kScalar;
    case Isa::kAvx2:
#if defined(CCIL_HAVE_AVX2)
      if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return &kAvx2;
#endif
      return nullptr;
    case Isa::kNeon:
#if defined(CCIL_HAVE_NEON)
      return &kNeon;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

const KernelTable& active() { return *current().load(std::memory_order_relaxed); }

bool select(Isa isa) {
  const KernelTable* t = table_for(isa);
  if (t == nullptr) return false;
  current().store(t, std::memory_order_relaxed);
  return true;
}

}  // namespace ccil::simd
