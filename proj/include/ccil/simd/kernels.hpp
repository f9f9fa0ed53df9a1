#pragma once

// Dense inner-loop kernels behind every network evaluation.
//
// Each kernel has a scalar reference implementation and, where the build
// target allows it, an AVX2+FMA (x86-64) or NEON (aarch64) variant. The
// variant is chosen once at first use from the running CPU's capabilities;
// CCIL_SIMD=scalar in the environment forces the reference path. Variants
// agree with the reference up to summation order.

#include <cstddef>
#include <span>
#include <string_view>

namespace ccil::simd {

enum class Isa { kScalar, kAvx2, kNeon };

using DotFn = double (*)(const double* a, const double* b, std::size_t n);
using AxpyFn = void (*)(double alpha, const double* x, double* y, std::size_t n);
using ScaleFn = void (*)(double alpha, double* x, std::size_t n);

struct KernelTable {
  Isa isa;
  std::string_view name;
  DotFn dot;
  AxpyFn axpy;
  ScaleFn scale;
};

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
}  // namespace scalar

/// Table for a specific ISA, or nullptr when it was not compiled in or the
/// CPU lacks the instructions.
const KernelTable* table_for(Isa isa);

/// Table used by the free functions below.
const KernelTable& active();

/// Override the runtime choice (tests). Returns false if `isa` is unavailable.
bool select(Isa isa);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}
inline void scale(double alpha, std::span<double> x) { active().scale(alpha, x.data(), x.size()); }

}  // namespace ccil::simd
