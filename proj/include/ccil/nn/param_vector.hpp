#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ccil::nn {

/// One named block inside a flat parameter vector.
struct LayerShape {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::size_t size() const { return rows * cols; }
  friend bool operator==(const LayerShape&, const LayerShape&) = default;
};

/// Flat vector of network weights plus the manifest describing its blocks.
/// All optimizer math (Adam, conjugate gradient, line search) works on this.
class ParamVector {
 public:
  ParamVector() = default;
  /// Zero-filled vector for the given manifest.
  explicit ParamVector(std::vector<LayerShape> manifest);
  /// Throws ShapeError on a length mismatch and NonFiniteError on NaN/Inf.
  ParamVector(std::vector<LayerShape> manifest, std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  const std::vector<LayerShape>& manifest() const { return manifest_; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  /// Block `k` of the manifest.
  std::span<double> block(std::size_t k);
  std::span<const double> block(std::size_t k) const;
  std::size_t block_offset(std::size_t k) const { return offsets_.at(k); }
  /// Index of the block with this name; throws if absent.
  std::size_t find_block(const std::string& name) const;

  bool all_finite() const;
  /// Throws NonFiniteError naming `what` if any entry is NaN/Inf.
  void require_finite(const char* what) const;
  /// Throws ShapeError unless `other` has an identical manifest.
  void require_same_shape(const ParamVector& other, const char* what) const;

  /// Zero vector with the same manifest.
  ParamVector zeros_like() const { return ParamVector(manifest_); }

  friend bool operator==(const ParamVector&, const ParamVector&) = default;

 private:
  void build_offsets();

  std::vector<LayerShape> manifest_;
  std::vector<std::size_t> offsets_;
  std::vector<double> values_;
};

// Vector arithmetic over ParamVectors of identical shape.
double dot(const ParamVector& a, const ParamVector& b);
double norm(const ParamVector& a);
/// y += alpha * x
void axpy(double alpha, const ParamVector& x, ParamVector& y);
void scale(double alpha, ParamVector& x);

}  // namespace ccil::nn
