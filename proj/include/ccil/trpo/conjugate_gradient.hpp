#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ccil::trpo {

using MatVec = std::function<std::vector<double>(std::span<const double>)>;

struct CgResult {
  std::vector<double> x;
  double residual_norm = 0.0;
  std::size_t iterations = 0;
};

/// Solve A x = b for symmetric positive-definite A given only products A v.
/// Stops when ||A x - b|| <= tol * ||b|| or after `iterations` steps.
/// Throws NonFiniteError with the iteration and residual if a NaN/Inf appears
/// or the curvature p'Ap is not positive.
CgResult conjugate_gradient(const MatVec& matvec, std::span<const double> b, std::size_t iterations, double tol);

}  // namespace ccil::trpo
