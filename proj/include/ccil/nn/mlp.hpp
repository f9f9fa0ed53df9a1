#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ccil/common/rng.hpp"
#include "ccil/nn/matrix.hpp"
#include "ccil/nn/param_vector.hpp"

namespace ccil::nn {

/// How the raw network output is interpreted.
enum class Head {
  kGaussianPolicy,       // raw output = action mean; plus a state-independent log-std block
  kCategoricalPolicy,    // raw output = logits
  kScalarValue,          // raw output[0] = value estimate
  kSigmoidDiscriminator  // raw output[0] = logit of D(s, a)
};

const char* head_name(Head h);

/// Activations of one batch forward pass. Tied to the parameter generation
/// that produced it; backward() and jvp() reject it once the net changes.
struct ForwardCache {
  std::uint64_t generation = 0;
  /// activations[0] is the input batch; activations.back() the raw output.
  std::vector<Matrix> activations;

  const Matrix& output() const { return activations.back(); }
  std::size_t batch_size() const { return activations.front().rows(); }
};

/// Fully connected tanh network with a linear output layer.
///
/// Parameter blocks are named fc<k>.weight (out x in, row-major) and
/// fc<k>.bias (out x 1); the Gaussian head appends log_std (1 x out).
class MlpNet {
 public:
  MlpNet() = default;
  /// Fan-in scaled uniform weights, zero biases. Policy heads get their final
  /// layer scaled by 0.01; the Gaussian log-std starts at 0.
  MlpNet(std::size_t input_dim, std::vector<std::size_t> hidden, std::size_t output_dim, Head head, Rng& rng);
  /// Wrap existing parameters; the manifest must match the layer widths.
  MlpNet(std::vector<std::size_t> widths, Head head, ParamVector params);

  Head head() const { return head_; }
  const std::vector<std::size_t>& widths() const { return widths_; }
  std::size_t input_dim() const { return widths_.front(); }
  std::size_t output_dim() const { return widths_.back(); }
  std::size_t num_layers() const { return widths_.size() - 1; }

  const ParamVector& params() const { return params_; }
  /// Replace all parameters. Shape must match; entries must be finite.
  void set_params(ParamVector p);
  /// Mutable access; invalidates outstanding caches.
  ParamVector& mutable_params();
  std::uint64_t generation() const { return generation_; }

  /// Index of the log_std block (Gaussian head only).
  std::size_t log_std_block() const;

  std::vector<double> forward(std::span<const double> input) const;
  ForwardCache forward_batch(const Matrix& inputs) const;

  /// Gradient of sum_i <upstream_i, output_i> with respect to the layer
  /// parameters. The log_std block (if any) is left at zero.
  ParamVector backward(const ForwardCache& cache, const Matrix& upstream) const;

  /// Directional derivative of the raw outputs along `tangent`.
  Matrix jvp(const ForwardCache& cache, const ParamVector& tangent) const;

 private:
  void check_cache(const ForwardCache& cache) const;
  void touch();

  std::vector<std::size_t> widths_;
  Head head_ = Head::kScalarValue;
  ParamVector params_;
  std::uint64_t generation_ = 0;
};

/// Manifest for the given widths and head.
std::vector<LayerShape> mlp_manifest(const std::vector<std::size_t>& widths, Head head);

}  // namespace ccil::nn
