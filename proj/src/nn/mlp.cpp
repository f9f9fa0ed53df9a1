#include "ccil/nn/mlp.hpp"

#include <atomic>
#include <cmath>
#include <string>

#include "ccil/common/errors.hpp"
#include "ccil/simd/kernels.hpp"

namespace ccil::nn {

namespace {

std::uint64_t next_generation() {
  static std::atomic<std::uint64_t> counter{0};
  return ++counter;
}

std::size_t weight_block(std::size_t layer) { return 2 * layer; }
std::size_t bias_block(std::size_t layer) { return 2 * layer + 1; }

}  // namespace

const char* head_name(Head h) {
  switch (h) {
    case Head::kGaussianPolicy:
      return "gaussian-policy";
    case Head::kCategoricalPolicy:
      return "categorical-policy";
    case Head::kScalarValue:
      return "scalar-value";
    case Head::kSigmoidDiscriminator:
      return "sigmoid-discriminator";
  }
  return "unknown";
}

std::vector<LayerShape> mlp_manifest(const std::vector<std::size_t>& widths, Head head) {
  if (widths.size() < 2) throw ShapeError("an MLP needs at least an input and an output width");
  for (std::size_t w : widths) {
    if (w == 0) throw ShapeError("layer widths must be positive");
  }
  std::vector<LayerShape> m;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    m.push_back({"fc" + std::to_string(l) + ".weight", widths[l + 1], widths[l]});
    m.push_back({"fc" + std::to_string(l) + ".bias", widths[l + 1], 1});
  }
  if (head == Head::kGaussianPolicy) m.push_back({"log_std", 1, widths.back()});
  return m;
}

MlpNet::MlpNet(std::size_t input_dim, std::vector<std::size_t> hidden, std::size_t output_dim, Head head,
               Rng& rng)
    : head_(head) {
  if ((head == Head::kScalarValue || head == Head::kSigmoidDiscriminator) && output_dim != 1) {
    throw ShapeError(std::string(head_name(head)) + " head requires output width 1");
  }
  widths_.push_back(input_dim);
  widths_.insert(widths_.end(), hidden.begin(), hidden.end());
  widths_.push_back(output_dim);
  params_ = ParamVector(mlp_manifest(widths_, head));

  const bool policy = head == Head::kGaussianPolicy || head == Head::kCategoricalPolicy;
  for (std::size_t l = 0; l < num_layers(); ++l) {
    const double fan_in = static_cast<double>(widths_[l]);
    double limit = std::sqrt(3.0 / fan_in);
    if (policy && l + 1 == num_layers()) limit *= 0.01;
    for (double& w : params_.block(weight_block(l))) w = rng.uniform(-limit, limit);
  }
  generation_ = next_generation();
}

MlpNet::MlpNet(std::vector<std::size_t> widths, Head head, ParamVector params)
    : widths_(std::move(widths)), head_(head) {
  if (params.manifest() != mlp_manifest(widths_, head_)) {
    throw ShapeError("parameter manifest does not match the network layout");
  }
  params.require_finite("network parameters");
  params_ = std::move(params);
  generation_ = next_generation();
}

void MlpNet::touch() { generation_ = next_generation(); }

void MlpNet::set_params(ParamVector p) {
  params_.require_same_shape(p, "set_params");
  p.require_finite("network parameters");
  params_ = std::move(p);
  touch();
}

ParamVector& MlpNet::mutable_params() {
  touch();
  return params_;
}

std::size_t MlpNet::log_std_block() const {
  if (head_ != Head::kGaussianPolicy) throw ShapeError("log_std exists only on the Gaussian head");
  return 2 * num_layers();
}

std::vector<double> MlpNet::forward(std::span<const double> input) const {
  Matrix batch(1, input.size(), std::vector<double>(input.begin(), input.end()));
  const ForwardCache cache = forward_batch(batch);
  auto out = cache.output().row(0);
  return {out.begin(), out.end()};
}

ForwardCache MlpNet::forward_batch(const Matrix& inputs) const {
  if (inputs.cols() != input_dim()) {
    throw ShapeError("input width " + std::to_string(inputs.cols()) + " does not match network input " +
                     std::to_string(input_dim()));
  }
  const std::size_t n = inputs.rows();
  ForwardCache cache;
  cache.generation = generation_;
  cache.activations.reserve(num_layers() + 1);
  cache.activations.push_back(inputs);
  for (std::size_t l = 0; l < num_layers(); ++l) {
    const std::size_t in = widths_[l];
    const std::size_t out = widths_[l + 1];
    const auto w = params_.block(weight_block(l));
    const auto b = params_.block(bias_block(l));
    const Matrix& a = cache.activations.back();
    Matrix z(n, out);
    const bool hidden = l + 1 < num_layers();
    for (std::size_t i = 0; i < n; ++i) {
      const auto x = a.row(i);
      auto zr = z.row(i);
      for (std::size_t j = 0; j < out; ++j) {
        const double v = simd::dot(w.subspan(j * in, in), x) + b[j];
        zr[j] = hidden ? std::tanh(v) : v;
      }
    }
    cache.activations.push_back(std::move(z));
  }
  return cache;
}

void MlpNet::check_cache(const ForwardCache& cache) const {
  if (cache.generation != generation_ || cache.activations.size() != num_layers() + 1) {
    throw StaleCacheError("forward cache was produced by different network parameters");
  }
}

ParamVector MlpNet::backward(const ForwardCache& cache, const Matrix& upstream) const {
  check_cache(cache);
  const std::size_t n = cache.batch_size();
  if (upstream.rows() != n || upstream.cols() != output_dim()) {
    throw ShapeError("upstream gradient must be batch x output width");
  }
  ParamVector grad = params_.zeros_like();
  Matrix delta = upstream;
  for (std::size_t l = num_layers(); l-- > 0;) {
    const std::size_t in = widths_[l];
    const std::size_t out = widths_[l + 1];
    const auto w = params_.block(weight_block(l));
    auto gw = grad.block(weight_block(l));
    auto gb = grad.block(bias_block(l));
    const Matrix& a = cache.activations[l];
    Matrix prev = l > 0 ? Matrix(n, in) : Matrix();
    for (std::size_t i = 0; i < n; ++i) {
      const auto d = delta.row(i);
      const auto x = a.row(i);
      for (std::size_t j = 0; j < out; ++j) {
        const double dj = d[j];
        if (dj == 0.0) continue;
        gb[j] += dj;
        simd::axpy(dj, x, gw.subspan(j * in, in));
        if (l > 0) simd::axpy(dj, w.subspan(j * in, in), prev.row(i));
      }
      if (l > 0) {
        auto pr = prev.row(i);
        for (std::size_t k = 0; k < in; ++k) pr[k] *= 1.0 - x[k] * x[k];
      }
    }
    delta = std::move(prev);
  }
  return grad;
}

Matrix MlpNet::jvp(const ForwardCache& cache, const ParamVector& tangent) const {
  check_cache(cache);
  params_.require_same_shape(tangent, "jvp");
  const std::size_t n = cache.batch_size();
  Matrix da(n, input_dim());
  for (std::size_t l = 0; l < num_layers(); ++l) {
    const std::size_t in = widths_[l];
    const std::size_t out = widths_[l + 1];
    const auto w = params_.block(weight_block(l));
    const auto tw = tangent.block(weight_block(l));
    const auto tb = tangent.block(bias_block(l));
    const Matrix& a = cache.activations[l];
    const Matrix& next = cache.activations[l + 1];
    const bool hidden = l + 1 < num_layers();
    Matrix dz(n, out);
    for (std::size_t i = 0; i < n; ++i) {
      const auto x = a.row(i);
      const auto dx = da.row(i);
      auto r = dz.row(i);
      for (std::size_t j = 0; j < out; ++j) {
        double v = simd::dot(tw.subspan(j * in, in), x) + tb[j];
        if (l > 0) v += simd::dot(w.subspan(j * in, in), dx);
        if (hidden) {
          const double h = next(i, j);
          v *= 1.0 - h * h;
        }
        r[j] = v;
      }
    }
    da = std::move(dz);
  }
  return da;
}

}  // namespace ccil::nn
