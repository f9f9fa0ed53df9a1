#pragma once

#include <span>
#include <vector>

#include "ccil/common/rng.hpp"
#include "ccil/nn/matrix.hpp"
#include "ccil/nn/mlp.hpp"

namespace ccil::nn {

/// Action distributions of a policy network over a batch of states.
/// Categorical actions are stored as a single column holding the index.
struct PolicyOutput {
  Head head = Head::kCategoricalPolicy;
  Matrix raw;                    // logits (categorical) or means (Gaussian)
  Matrix log_probs;              // log-softmax, categorical only
  std::vector<double> log_std;   // Gaussian only
  ForwardCache cache;

  std::size_t batch_size() const { return raw.rows(); }
};

PolicyOutput evaluate_policy(const MlpNet& net, const Matrix& states);

/// Width of an action row for this head: 1 for categorical, action dim otherwise.
std::size_t action_width(const MlpNet& net);

std::vector<double> log_prob(const PolicyOutput& out, const Matrix& actions);

/// Analytic entropy at each state.
std::vector<double> entropy(const PolicyOutput& out);

/// KL(p || q) at each state; p and q must come from the same state batch.
std::vector<double> kl_divergence(const PolicyOutput& p, const PolicyOutput& q);

struct ActionSample {
  std::vector<double> action;
  double log_prob = 0.0;
};

ActionSample sample_action(const MlpNet& net, std::span<const double> observation, Rng& rng);

/// Gradient of  sum_i weights[i] * log pi(a_i|s_i) + entropy_weight * mean_i H(pi(.|s_i)).
ParamVector log_prob_gradient(const MlpNet& net, const PolicyOutput& out, const Matrix& actions,
                              std::span<const double> weights, double entropy_weight);

/// Gradient of mean_i KL(pi_net(.|s_i) || reference(.|s_i)) with respect to net.
ParamVector kl_gradient(const MlpNet& net, const PolicyOutput& current, const PolicyOutput& reference);

/// (F + damping I) v where F is the Hessian of the mean KL between a frozen
/// copy of the policy and the live policy, taken where the two coincide.
ParamVector fisher_vector_product(const MlpNet& net, const PolicyOutput& out, const ParamVector& v,
                                  double damping);
ParamVector fisher_vector_product(const MlpNet& net, const Matrix& states, const ParamVector& v, double damping);

}  // namespace ccil::nn
