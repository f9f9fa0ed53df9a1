#include "ccil/trpo/conjugate_gradient.hpp"

#include <cmath>
#include <string>

#include "ccil/common/errors.hpp"
#include "ccil/simd/kernels.hpp"

namespace ccil::trpo {

CgResult conjugate_gradient(const MatVec& matvec, std::span<const double> b, std::size_t iterations, double tol) {
  const std::size_t n = b.size();
  CgResult res;
  res.x.assign(n, 0.0);
  std::vector<double> r(b.begin(), b.end());
  std::vector<double> p = r;
  double rr = simd::dot(r, r);
  const double b_norm = std::sqrt(rr);
  res.residual_norm = b_norm;
  if (!std::isfinite(rr)) throw NonFiniteError("conjugate gradient: right-hand side is not finite");
  if (b_norm == 0.0) return res;

  for (std::size_t k = 0; k < iterations; ++k) {
    std::vector<double> ap = matvec(p);
    if (ap.size() != n) throw ShapeError("conjugate gradient: operator changed the vector length");
    const double pap = simd::dot(p, ap);
    if (!std::isfinite(pap) || pap <= 0.0) {
      throw NonFiniteError("conjugate gradient: bad curvature " + std::to_string(pap) + " at iteration " +
                           std::to_string(k) + ", residual " + std::to_string(res.residual_norm));
    }
    const double alpha = rr / pap;
    simd::axpy(alpha, p, res.x);
    simd::axpy(-alpha, ap, r);
    const double rr_new = simd::dot(r, r);
    res.iterations = k + 1;
    res.residual_norm = std::sqrt(rr_new);
    if (!std::isfinite(rr_new)) {
      throw NonFiniteError("conjugate gradient: residual became non-finite at iteration " + std::to_string(k));
    }
    if (res.residual_norm <= tol * b_norm) break;
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
  }
  return res;
}

}  // namespace ccil::trpo
