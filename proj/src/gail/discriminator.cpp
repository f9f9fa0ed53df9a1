#include "ccil/gail/discriminator.hpp"

#include <algorithm>
#include <cmath>

#include "ccil/common/errors.hpp"
#include "ccil/nn/policy_head.hpp"

namespace ccil::gail {

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double clamp_d(double d) { return std::clamp(d, kClampLow, kClampHigh); }

double bernoulli_entropy(double d) { return -d * std::log(d) - (1.0 - d) * std::log(1.0 - d); }

double mean_log(std::span<const double> d, bool complement) {
  double s = 0.0;
  for (double v : d) s += std::log(complement ? 1.0 - v : v);
  return s / static_cast<double>(d.size());
}

}  // namespace

Discriminator::Discriminator(std::size_t observation_dim, env::ActionSpace actions, std::vector<std::size_t> hidden,
                             Rng& rng, DiscriminatorConfig config)
    : actions_(actions),
      net_(observation_dim + actions.encoded_width() + (config.absorbing ? 1 : 0), std::move(hidden), 1, nn::Head::kSigmoidDiscriminator, rng),
      adam_(net_.params().size(), config.learning_rate),
      config_(config) {}

nn::Matrix Discriminator::encode(const nn::Matrix& observations, const nn::Matrix& actions) const {
  if (observations.rows() != actions.rows()) throw ShapeError("observation and action batches differ in length");
  if (actions.cols() != actions_.stored_width()) throw ShapeError("action width does not match the action space");
  const std::size_t od = observations.cols();
  const std::size_t aw = actions_.encoded_width();
  const std::size_t flag = config_.absorbing ? 1 : 0;
  if (od + aw + flag != net_.input_dim()) throw ShapeError("observation width does not match the discriminator");
  nn::Matrix x(observations.rows(), od + aw + flag);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto o = observations.row(i);
    std::copy(o.begin(), o.end(), x.row(i).begin());
    if (actions_.kind == env::ActionKind::kDiscrete) {
      const double a = actions(i, 0);
      if (!(a >= 0.0 && a < static_cast<double>(aw))) throw ShapeError("discrete action out of range");
      x(i, od + static_cast<std::size_t>(a)) = 1.0;
    } else {
      auto a = actions.row(i);
      std::copy(a.begin(), a.end(), x.row(i).begin() + static_cast<std::ptrdiff_t>(od));
    }
  }
  return x;
}

nn::Matrix Discriminator::absorbing_inputs(std::size_t n) const {
  if (!config_.absorbing) throw ConfigError("discriminator has no absorbing-state input");
  nn::Matrix x(n, net_.input_dim());
  for (std::size_t i = 0; i < n; ++i) x(i, net_.input_dim() - 1) = 1.0;
  return x;
}

std::vector<double> Discriminator::probabilities(const nn::Matrix& inputs) const {
  nn::ForwardCache c = net_.forward_batch(inputs);
  std::vector<double> d(inputs.rows());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = clamp_d(sigmoid(c.output()(i, 0)));
  return d;
}

std::vector<double> Discriminator::surrogate_rewards(const nn::Matrix& inputs) const {
  std::vector<double> d = probabilities(inputs);
  for (double& v : d) v = config_.expert_positive ? -std::log(1.0 - v) : -std::log(v);
  return d;
}

double discriminator_loss(std::span<const double> d_learner, std::span<const double> d_expert, bool expert_positive) {
  if (d_learner.empty() || d_expert.empty()) throw ShapeError("discriminator loss needs non-empty batches");
  if (expert_positive) return mean_log(d_expert, false) + mean_log(d_learner, true);
  return mean_log(d_learner, false) + mean_log(d_expert, true);
}

double discriminator_loss(const Discriminator& disc, const nn::Matrix& learner, const nn::Matrix& expert) {
  return discriminator_loss(disc.probabilities(learner), disc.probabilities(expert), disc.config().expert_positive);
}

double discriminator_objective(const Discriminator& disc, const nn::Matrix& learner, const nn::Matrix& expert) {
  const auto dl = disc.probabilities(learner);
  const auto de = disc.probabilities(expert);
  double h = 0.0;
  for (double d : dl) h += bernoulli_entropy(d);
  for (double d : de) h += bernoulli_entropy(d);
  h /= static_cast<double>(dl.size() + de.size());
  return discriminator_loss(dl, de, disc.config().expert_positive) + disc.config().entropy_weight * h;
}

nn::ParamVector discriminator_gradient(const Discriminator& disc, const nn::Matrix& learner,
                                       const nn::Matrix& expert) {
  if (learner.rows() == 0 || expert.rows() == 0) throw ShapeError("discriminator update needs non-empty batches");
  const bool swap = disc.config().expert_positive;
  const double w = disc.config().entropy_weight;
  const double n_all = static_cast<double>(learner.rows() + expert.rows());

  // d/dz of each per-row term; a clamped D has zero derivative.
  auto grads = [&](const nn::Matrix& x, bool positive, double n) {
    nn::ForwardCache c = disc.net().forward_batch(x);
    nn::Matrix up(x.rows(), 1);
    for (std::size_t i = 0; i < x.rows(); ++i) {
      const double z = c.output()(i, 0);
      const double s = sigmoid(z);
      if (s < kClampLow || s > kClampHigh) continue;
      const double dlog = positive ? (1.0 - s) : -s;
      const double dent = std::log((1.0 - s) / s) * s * (1.0 - s);
      up(i, 0) = dlog / n + w * dent / n_all;
    }
    return disc.net().backward(c, up);
  };
  nn::ParamVector g = grads(learner, !swap, static_cast<double>(learner.rows()));
  nn::axpy(1.0, grads(expert, swap, static_cast<double>(expert.rows())), g);
  return g;
}

double discriminator_update(Discriminator& disc, const nn::Matrix& learner, const nn::Matrix& expert) {
  const double before = discriminator_objective(disc, learner, expert);
  nn::ParamVector g = discriminator_gradient(disc, learner, expert);
  disc.net().set_params(nn::adam_step(disc.net().params(), g, disc.adam(), nn::Direction::kAscent));
  return before;
}

EntropyEstimate causal_entropy(const nn::MlpNet& policy, const nn::Matrix& states) {
  if (states.rows() == 0) throw ShapeError("entropy needs at least one state");
  const auto h = nn::entropy(nn::evaluate_policy(policy, states));
  double s = 0.0;
  for (double v : h) s += v;
  return {s / static_cast<double>(h.size()), EntropyEstimator::kAnalytic};
}

}  // namespace ccil::gail
