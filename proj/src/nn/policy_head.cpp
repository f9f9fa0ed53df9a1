#include "ccil/nn/policy_head.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ccil/common/errors.hpp"

namespace ccil::nn {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;  // log(2*pi)

bool is_policy(Head h) { return h == Head::kGaussianPolicy || h == Head::kCategoricalPolicy; }

void require_policy(const MlpNet& net) {
  if (!is_policy(net.head())) throw ShapeError("expected a policy head");
}

std::size_t action_index(double a, std::size_t n) {
  if (!(a >= 0.0) || a >= static_cast<double>(n) || a != std::floor(a)) {
    throw ShapeError("categorical action index out of range");
  }
  return static_cast<std::size_t>(a);
}

void check_actions(const PolicyOutput& out, const Matrix& actions) {
  const std::size_t width = out.head == Head::kCategoricalPolicy ? 1 : out.raw.cols();
  if (actions.rows() != out.batch_size() || actions.cols() != width) {
    throw ShapeError("action batch does not match policy output");
  }
}

}  // namespace

PolicyOutput evaluate_policy(const MlpNet& net, const Matrix& states) {
  require_policy(net);
  PolicyOutput out;
  out.head = net.head();
  out.cache = net.forward_batch(states);
  out.raw = out.cache.output();
  if (out.head == Head::kCategoricalPolicy) {
    out.log_probs = Matrix(out.raw.rows(), out.raw.cols());
    for (std::size_t i = 0; i < out.raw.rows(); ++i) {
      const auto z = out.raw.row(i);
      const double m = *std::max_element(z.begin(), z.end());
      double s = 0.0;
      for (double v : z) s += std::exp(v - m);
      const double lse = m + std::log(s);
      auto lp = out.log_probs.row(i);
      for (std::size_t k = 0; k < z.size(); ++k) lp[k] = z[k] - lse;
    }
  } else {
    const auto ls = net.params().block(net.log_std_block());
    out.log_std.assign(ls.begin(), ls.end());
  }
  return out;
}

std::size_t action_width(const MlpNet& net) {
  return net.head() == Head::kCategoricalPolicy ? 1 : net.output_dim();
}

std::vector<double> log_prob(const PolicyOutput& out, const Matrix& actions) {
  check_actions(out, actions);
  const std::size_t n = out.batch_size();
  std::vector<double> lp(n);
  if (out.head == Head::kCategoricalPolicy) {
    for (std::size_t i = 0; i < n; ++i) lp[i] = out.log_probs(i, action_index(actions(i, 0), out.raw.cols()));
    return lp;
  }
  const std::size_t d = out.raw.cols();
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double z = (actions(i, k) - out.raw(i, k)) * std::exp(-out.log_std[k]);
      s += -0.5 * z * z - out.log_std[k] - 0.5 * kLog2Pi;
    }
    lp[i] = s;
  }
  return lp;
}

std::vector<double> entropy(const PolicyOutput& out) {
  const std::size_t n = out.batch_size();
  std::vector<double> h(n, 0.0);
  if (out.head == Head::kCategoricalPolicy) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto lp = out.log_probs.row(i);
      double s = 0.0;
      for (double l : lp) s -= std::exp(l) * l;
      h[i] = s;
    }
    return h;
  }
  double s = 0.0;
  for (double l : out.log_std) s += 0.5 * (kLog2Pi + 1.0) + l;
  std::fill(h.begin(), h.end(), s);
  return h;
}

std::vector<double> kl_divergence(const PolicyOutput& p, const PolicyOutput& q) {
  if (p.head != q.head || p.raw.rows() != q.raw.rows() || p.raw.cols() != q.raw.cols()) {
    throw ShapeError("KL between mismatched policy outputs");
  }
  const std::size_t n = p.batch_size();
  std::vector<double> kl(n, 0.0);
  if (p.head == Head::kCategoricalPolicy) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto lp = p.log_probs.row(i);
      const auto lq = q.log_probs.row(i);
      double s = 0.0;
      for (std::size_t k = 0; k < lp.size(); ++k) s += std::exp(lp[k]) * (lp[k] - lq[k]);
      kl[i] = std::max(s, 0.0);
    }
    return kl;
  }
  const std::size_t d = p.raw.cols();
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double vp = std::exp(2.0 * p.log_std[k]);
      const double vq = std::exp(2.0 * q.log_std[k]);
      const double dm = p.raw(i, k) - q.raw(i, k);
      s += q.log_std[k] - p.log_std[k] + (vp + dm * dm) / (2.0 * vq) - 0.5;
    }
    kl[i] = std::max(s, 0.0);
  }
  return kl;
}

ActionSample sample_action(const MlpNet& net, std::span<const double> observation, Rng& rng) {
  require_policy(net);
  const std::vector<double> raw = net.forward(observation);
  ActionSample s;
  if (net.head() == Head::kCategoricalPolicy) {
    const double m = *std::max_element(raw.begin(), raw.end());
    double z = 0.0;
    for (double v : raw) z += std::exp(v - m);
    const double lse = m + std::log(z);
    const double u = rng.uniform();
    double acc = 0.0;
    std::size_t pick = raw.size() - 1;
    for (std::size_t k = 0; k < raw.size(); ++k) {
      acc += std::exp(raw[k] - lse);
      if (u < acc) {
        pick = k;
        break;
      }
    }
    s.action = {static_cast<double>(pick)};
    s.log_prob = raw[pick] - lse;
    return s;
  }
  const auto ls = net.params().block(net.log_std_block());
  s.action.resize(raw.size());
  for (std::size_t k = 0; k < raw.size(); ++k) {
    const double eps = rng.normal();
    s.action[k] = raw[k] + std::exp(ls[k]) * eps;
    s.log_prob += -0.5 * eps * eps - ls[k] - 0.5 * kLog2Pi;
  }
  return s;
}

ParamVector log_prob_gradient(const MlpNet& net, const PolicyOutput& out, const Matrix& actions,
                              std::span<const double> weights, double entropy_weight) {
  check_actions(out, actions);
  const std::size_t n = out.batch_size();
  if (weights.size() != n) throw ShapeError("one weight per sample is required");
  const std::size_t k = out.raw.cols();
  Matrix up(n, k);
  const double ent_per_state = n > 0 ? entropy_weight / static_cast<double>(n) : 0.0;
  if (out.head == Head::kCategoricalPolicy) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto lp = out.log_probs.row(i);
      const std::size_t a = action_index(actions(i, 0), k);
      double h = 0.0;
      if (ent_per_state != 0.0) {
        for (double l : lp) h -= std::exp(l) * l;
      }
      auto u = up.row(i);
      for (std::size_t j = 0; j < k; ++j) {
        const double p = std::exp(lp[j]);
        u[j] = weights[i] * ((j == a ? 1.0 : 0.0) - p);
        if (ent_per_state != 0.0) u[j] += ent_per_state * (-p * (lp[j] + h));
      }
    }
    return net.backward(out.cache, up);
  }
  std::vector<double> g_log_std(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto u = up.row(i);
    for (std::size_t j = 0; j < k; ++j) {
      const double inv_var = std::exp(-2.0 * out.log_std[j]);
      const double diff = actions(i, j) - out.raw(i, j);
      u[j] = weights[i] * diff * inv_var;
      g_log_std[j] += weights[i] * (diff * diff * inv_var - 1.0);
    }
  }
  ParamVector grad = net.backward(out.cache, up);
  auto gls = grad.block(net.log_std_block());
  for (std::size_t j = 0; j < k; ++j) gls[j] = g_log_std[j] + entropy_weight;
  return grad;
}

ParamVector kl_gradient(const MlpNet& net, const PolicyOutput& current, const PolicyOutput& reference) {
  const std::size_t n = current.batch_size();
  const std::size_t k = current.raw.cols();
  if (reference.batch_size() != n || reference.raw.cols() != k) throw ShapeError("KL gradient shape mismatch");
  const double inv_n = n > 0 ? 1.0 / static_cast<double>(n) : 0.0;
  Matrix up(n, k);
  if (current.head == Head::kCategoricalPolicy) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto lp = current.log_probs.row(i);
      const auto lq = reference.log_probs.row(i);
      double kl = 0.0;
      for (std::size_t j = 0; j < k; ++j) kl += std::exp(lp[j]) * (lp[j] - lq[j]);
      auto u = up.row(i);
      for (std::size_t j = 0; j < k; ++j) u[j] = inv_n * std::exp(lp[j]) * (lp[j] - lq[j] - kl);
    }
    return net.backward(current.cache, up);
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto u = up.row(i);
    for (std::size_t j = 0; j < k; ++j) {
      u[j] = inv_n * (current.raw(i, j) - reference.raw(i, j)) * std::exp(-2.0 * reference.log_std[j]);
    }
  }
  ParamVector grad = net.backward(current.cache, up);
  auto gls = grad.block(net.log_std_block());
  for (std::size_t j = 0; j < k; ++j) {
    gls[j] = n > 0 ? -1.0 + std::exp(2.0 * (current.log_std[j] - reference.log_std[j])) : 0.0;
  }
  return grad;
}

ParamVector fisher_vector_product(const MlpNet& net, const PolicyOutput& out, const ParamVector& v,
                                  double damping) {
  net.params().require_same_shape(v, "fisher_vector_product");
  const std::size_t n = out.batch_size();
  const std::size_t k = out.raw.cols();
  const double inv_n = n > 0 ? 1.0 / static_cast<double>(n) : 0.0;
  Matrix t = net.jvp(out.cache, v);
  if (out.head == Head::kCategoricalPolicy) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto lp = out.log_probs.row(i);
      auto r = t.row(i);
      double pt = 0.0;
      for (std::size_t j = 0; j < k; ++j) pt += std::exp(lp[j]) * r[j];
      for (std::size_t j = 0; j < k; ++j) r[j] = inv_n * std::exp(lp[j]) * (r[j] - pt);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      auto r = t.row(i);
      for (std::size_t j = 0; j < k; ++j) r[j] *= inv_n * std::exp(-2.0 * out.log_std[j]);
    }
  }
  ParamVector fv = net.backward(out.cache, t);
  if (out.head == Head::kGaussianPolicy && n > 0) {
    const std::size_t b = net.log_std_block();
    auto dst = fv.block(b);
    const auto src = v.block(b);
    for (std::size_t j = 0; j < k; ++j) dst[j] = 2.0 * src[j];
  }
  if (damping != 0.0) axpy(damping, v, fv);
  return fv;
}

ParamVector fisher_vector_product(const MlpNet& net, const Matrix& states, const ParamVector& v, double damping) {
  return fisher_vector_product(net, evaluate_policy(net, states), v, damping);
}

}  // namespace ccil::nn
