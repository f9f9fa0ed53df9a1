#include "ccil/nn/param_vector.hpp"

#include <cmath>
#include <numeric>

#include "ccil/common/errors.hpp"
#include "ccil/simd/kernels.hpp"

namespace ccil::nn {

ParamVector::ParamVector(std::vector<LayerShape> manifest) : manifest_(std::move(manifest)) {
  build_offsets();
  values_.assign(offsets_.empty() ? 0 : offsets_.back() + manifest_.back().size(), 0.0);
}

ParamVector::ParamVector(std::vector<LayerShape> manifest, std::vector<double> values)
    : manifest_(std::move(manifest)), values_(std::move(values)) {
  build_offsets();
  const std::size_t expected = offsets_.empty() ? 0 : offsets_.back() + manifest_.back().size();
  if (expected != values_.size()) {
    throw ShapeError("parameter vector length " + std::to_string(values_.size()) +
                     " does not match manifest total " + std::to_string(expected));
  }
  require_finite("parameter vector");
}

void ParamVector::build_offsets() {
  offsets_.clear();
  std::size_t off = 0;
  for (const auto& l : manifest_) {
    offsets_.push_back(off);
    off += l.size();
  }
}

std::span<double> ParamVector::block(std::size_t k) {
  return {values_.data() + offsets_.at(k), manifest_[k].size()};
}

std::span<const double> ParamVector::block(std::size_t k) const {
  return {values_.data() + offsets_.at(k), manifest_[k].size()};
}

std::size_t ParamVector::find_block(const std::string& name) const {
  for (std::size_t k = 0; k < manifest_.size(); ++k) {
    if (manifest_[k].name == name) return k;
  }
  throw ShapeError("no parameter block named '" + name + "'");
}

bool ParamVector::all_finite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void ParamVector::require_finite(const char* what) const {
  if (!all_finite()) throw NonFiniteError(std::string(what) + " contains NaN or Inf");
}

void ParamVector::require_same_shape(const ParamVector& other, const char* what) const {
  if (manifest_ != other.manifest_ || values_.size() != other.values_.size()) {
    throw ShapeError(std::string(what) + ": parameter vectors have different shapes");
  }
}

double dot(const ParamVector& a, const ParamVector& b) {
  a.require_same_shape(b, "dot");
  return simd::dot(a.values(), b.values());
}

double norm(const ParamVector& a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, const ParamVector& x, ParamVector& y) {
  x.require_same_shape(y, "axpy");
  simd::axpy(alpha, x.values(), y.values());
}

void scale(double alpha, ParamVector& x) { simd::scale(alpha, x.values()); }

}  // namespace ccil::nn
