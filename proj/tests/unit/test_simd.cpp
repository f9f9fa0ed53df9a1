#include <doctest.h>

#include <cmath>
#include <vector>

#include "ccil/simd/kernels.hpp"
#include "support.hpp"

using namespace ccil;

namespace {

std::vector<simd::Isa> available() {
  std::vector<simd::Isa> out;
  for (auto isa : {simd::Isa::kScalar, simd::Isa::kAvx2, simd::Isa::kNeon}) {
    if (simd::table_for(isa) != nullptr) out.push_back(isa);
  }
  return out;
}

}  // namespace

TEST_CASE("scalar kernels match plain loops exactly") {
  Rng rng(1);
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 16u, 33u}) {
    auto a = testing::random_vector(n, rng);
    auto b = testing::random_vector(n, rng);
    double ref = 0.0;
    for (std::size_t i = 0; i < n; ++i) ref += a[i] * b[i];
    CHECK(simd::scalar::dot(a.data(), b.data(), n) == ref);

    auto y = b;
    simd::scalar::axpy(0.5, a.data(), y.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(y[i] == b[i] + 0.5 * a[i]);

    auto z = a;
    simd::scalar::scale(-3.0, z.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(z[i] == -3.0 * a[i]);
  }
}

TEST_CASE("every compiled variant agrees with the scalar reference") {
  const auto* ref = simd::table_for(simd::Isa::kScalar);
  Rng rng(2);
  for (auto isa : available()) {
    const auto* t = simd::table_for(isa);
    CAPTURE(t->name);
    for (std::size_t n = 0; n < 70; ++n) {
      auto a = testing::random_vector(n, rng);
      auto b = testing::random_vector(n, rng);
      double mag = 0.0;
      for (std::size_t i = 0; i < n; ++i) mag += std::abs(a[i] * b[i]);
      CHECK(std::abs(t->dot(a.data(), b.data(), n) - ref->dot(a.data(), b.data(), n)) <= 1e-14 * (mag + 1.0));

      // Element-wise kernels have no reduction, so even FMA variants must match
      // the reference to one rounding.
      auto y1 = b, y2 = b;
      t->axpy(0.37, a.data(), y1.data(), n);
      ref->axpy(0.37, a.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-15 * (std::abs(y2[i]) + 1.0));

      auto z1 = a, z2 = a;
      t->scale(1.7, z1.data(), n);
      ref->scale(1.7, z2.data(), n);
      CHECK(z1 == z2);
    }
  }
}

TEST_CASE("select switches the active table and rejects missing variants") {
  const simd::Isa before = simd::active().isa;
  CHECK(simd::select(simd::Isa::kScalar));
  CHECK(simd::active().isa == simd::Isa::kScalar);
  for (auto isa : {simd::Isa::kAvx2, simd::Isa::kNeon}) {
    CHECK(simd::select(isa) == (simd::table_for(isa) != nullptr));
  }
  CHECK(simd::select(before));
}
