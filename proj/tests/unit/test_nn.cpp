#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "ccil/common/errors.hpp"
#include "ccil/nn/adam.hpp"
#include "ccil/nn/mlp.hpp"
#include "ccil/nn/policy_head.hpp"
#include "ccil/nn/serialize.hpp"
#include "support.hpp"

using namespace ccil;
using nn::Head;
using nn::Matrix;
using nn::MlpNet;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng) {
  Matrix m(r, c);
  for (double& v : m.data()) v = rng.normal();
  return m;
}

MlpNet with_params(const MlpNet& net, const nn::ParamVector& p) {
  MlpNet out = net;
  out.set_params(p);
  return out;
}

// Hand-rolled forward pass straight from the parameter blocks.
std::vector<double> reference_forward(const MlpNet& net, std::vector<double> x) {
  const auto& p = net.params();
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    auto w = p.block(p.find_block("fc" + std::to_string(l) + ".weight"));
    auto b = p.block(p.find_block("fc" + std::to_string(l) + ".bias"));
    const std::size_t in = net.widths()[l], out = net.widths()[l + 1];
    std::vector<double> y(out);
    for (std::size_t j = 0; j < out; ++j) {
      double s = b[j];
      for (std::size_t i = 0; i < in; ++i) s += w[j * in + i] * x[i];
      y[j] = l + 1 < net.num_layers() ? std::tanh(s) : s;
    }
    x = std::move(y);
  }
  return x;
}

}  // namespace

TEST_CASE("forward pass examples") {
  Rng rng(3);
  SUBCASE("zero weights give the output bias") {
    MlpNet net(3, {4}, 1, Head::kScalarValue, rng);
    nn::ParamVector p = net.params().zeros_like();
    p.block(p.find_block("fc1.bias"))[0] = 0.75;
    net.set_params(p);
    CHECK(net.forward(std::vector<double>{1.0, -2.0, 3.0})[0] == 0.75);
  }
  SUBCASE("single linear layer") {
    nn::ParamVector p(nn::mlp_manifest({1, 1}, Head::kScalarValue), {2.0, 0.0});
    MlpNet net({1, 1}, Head::kScalarValue, p);
    CHECK(net.forward(std::vector<double>{3.0})[0] == 6.0);
  }
  SUBCASE("matches an independent matrix/tanh chain") {
    for (int trial = 0; trial < 5; ++trial) {
      MlpNet net(4, {6, 5}, 3, Head::kCategoricalPolicy, rng);
      nn::ParamVector p = net.params();
      for (double& v : p.values()) v = rng.normal();
      net.set_params(p);
      auto x = testing::random_vector(4, rng);
      auto got = net.forward(x);
      auto want = reference_forward(net, x);
      for (std::size_t j = 0; j < 3; ++j) CHECK(got[j] == doctest::Approx(want[j]).epsilon(1e-13));
    }
  }
}

TEST_CASE("backward of a linear layer is the outer product with the input") {
  nn::ParamVector p(nn::mlp_manifest({3, 1}, Head::kScalarValue), {0.3, -0.2, 0.5, 0.1});
  MlpNet net({3, 1}, Head::kScalarValue, p);
  Matrix x(1, 3, std::vector<double>{1.0, 2.0, -4.0});
  auto cache = net.forward_batch(x);
  auto g = net.backward(cache, Matrix(1, 1, 1.0));
  CHECK(g[0] == 1.0);
  CHECK(g[1] == 2.0);
  CHECK(g[2] == -4.0);
  CHECK(g[3] == 1.0);
  auto z = net.backward(cache, Matrix(1, 1, 0.0));
  for (double v : z.values()) CHECK(v == 0.0);
}

TEST_CASE("backward matches central differences for every head") {
  Rng rng(4);
  for (Head h : {Head::kGaussianPolicy, Head::kCategoricalPolicy, Head::kScalarValue, Head::kSigmoidDiscriminator}) {
    CAPTURE(nn::head_name(h));
    const std::size_t out = (h == Head::kScalarValue || h == Head::kSigmoidDiscriminator) ? 1 : 3;
    MlpNet net(4, {7, 5}, out, h, rng);
    Matrix x = random_matrix(6, 4, rng);
    Matrix up = random_matrix(6, out, rng);
    auto f = [&](const nn::ParamVector& p) {
      auto c = with_params(net, p).forward_batch(x);
      double s = 0.0;
      for (std::size_t i = 0; i < up.data().size(); ++i) s += up.data()[i] * c.output().data()[i];
      return s;
    };
    auto g = net.backward(net.forward_batch(x), up);
    auto num = testing::numeric_gradient(net.params(), f);
    CHECK(testing::relative_error(g.values(), num) < 1e-7);
  }
}

TEST_CASE("jvp matches a directional difference") {
  Rng rng(5);
  MlpNet net(3, {8}, 2, Head::kCategoricalPolicy, rng);
  Matrix x = random_matrix(5, 3, rng);
  nn::ParamVector t = net.params().zeros_like();
  for (double& v : t.values()) v = rng.normal();
  auto j = net.jvp(net.forward_batch(x), t);
  const double h = 1e-6;
  nn::ParamVector up = net.params(), dn = net.params();
  nn::axpy(h, t, up);
  nn::axpy(-h, t, dn);
  auto cu = with_params(net, up).forward_batch(x);
  auto cd = with_params(net, dn).forward_batch(x);
  for (std::size_t i = 0; i < j.data().size(); ++i) {
    CHECK(j.data()[i] == doctest::Approx((cu.output().data()[i] - cd.output().data()[i]) / (2 * h)).epsilon(1e-6));
  }
}

TEST_CASE("stale caches are rejected after a parameter change") {
  Rng rng(6);
  MlpNet net(2, {3}, 1, Head::kScalarValue, rng);
  auto cache = net.forward_batch(Matrix(1, 2, 0.5));
  net.set_params(net.params());
  CHECK_THROWS_AS(net.backward(cache, Matrix(1, 1, 1.0)), StaleCacheError);
}

TEST_CASE("set_params rejects bad shapes and non-finite values") {
  Rng rng(7);
  MlpNet net(2, {3}, 1, Head::kScalarValue, rng);
  MlpNet other(2, {4}, 1, Head::kScalarValue, rng);
  CHECK_THROWS_AS(net.set_params(other.params()), ShapeError);
  std::vector<double> v(net.params().values().begin(), net.params().values().end());
  v[0] = std::nan("");
  CHECK_THROWS_AS(nn::ParamVector(net.params().manifest(), v), NonFiniteError);
}

TEST_CASE("policy head closed forms") {
  Rng rng(8);
  SUBCASE("uniform categorical entropy is log n") {
    MlpNet net(2, {3}, 4, Head::kCategoricalPolicy, rng);
    net.set_params(net.params().zeros_like());
    auto out = nn::evaluate_policy(net, Matrix(1, 2, 0.3));
    CHECK(nn::entropy(out)[0] == doctest::Approx(std::log(4.0)).epsilon(1e-14));
  }
  SUBCASE("unit Gaussian entropy in two dimensions") {
    MlpNet net(2, {3}, 2, Head::kGaussianPolicy, rng);
    auto out = nn::evaluate_policy(net, Matrix(1, 2, 0.3));
    CHECK(nn::entropy(out)[0] == doctest::Approx(std::log(2 * std::numbers::pi * std::numbers::e)).epsilon(1e-14));
  }
  SUBCASE("Gaussian KL for a unit mean shift is one half") {
    nn::ParamVector p(nn::mlp_manifest({1, 2}, Head::kGaussianPolicy));
    MlpNet a({1, 2}, Head::kGaussianPolicy, p);
    p.block(p.find_block("fc0.bias"))[1] = 1.0;
    MlpNet b({1, 2}, Head::kGaussianPolicy, p);
    Matrix s(1, 1, 0.0);
    CHECK(nn::kl_divergence(nn::evaluate_policy(a, s), nn::evaluate_policy(b, s))[0] == doctest::Approx(0.5));
  }
  SUBCASE("categorical KL against the direct sum") {
    nn::ParamVector p(nn::mlp_manifest({1, 2}, Head::kCategoricalPolicy));
    MlpNet a({1, 2}, Head::kCategoricalPolicy, p);
    p.block(p.find_block("fc0.bias"))[0] = std::log(0.9);
    p.block(p.find_block("fc0.bias"))[1] = std::log(0.1);
    MlpNet b({1, 2}, Head::kCategoricalPolicy, p);
    Matrix s(1, 1, 0.0);
    const double want = 0.5 * std::log(0.5 / 0.9) + 0.5 * std::log(0.5 / 0.1);
    CHECK(nn::kl_divergence(nn::evaluate_policy(a, s), nn::evaluate_policy(b, s))[0] ==
          doctest::Approx(want).epsilon(1e-13));
    CHECK(want == doctest::Approx(0.5108).epsilon(1e-4));
  }
}

TEST_CASE("log-prob gradient matches central differences") {
  Rng rng(9);
  for (Head h : {Head::kGaussianPolicy, Head::kCategoricalPolicy}) {
    CAPTURE(nn::head_name(h));
    MlpNet net(3, {6}, 2, h, rng);
    nn::ParamVector p = net.params();
    for (double& v : p.values()) v = 0.5 * rng.normal();
    net.set_params(p);
    Matrix s = random_matrix(8, 3, rng);
    Matrix a(8, nn::action_width(net));
    for (std::size_t i = 0; i < 8; ++i) a.row(i)[0] = h == Head::kCategoricalPolicy ? double(rng.below(2)) : rng.normal();
    if (h == Head::kGaussianPolicy) {
      for (std::size_t i = 0; i < 8; ++i) a(i, 1) = rng.normal();
    }
    auto w = testing::random_vector(8, rng);
    const double beta = 0.3;
    auto f = [&](const nn::ParamVector& q) {
      auto out = nn::evaluate_policy(with_params(net, q), s);
      auto lp = nn::log_prob(out, a);
      auto ent = nn::entropy(out);
      double v = 0.0, e = 0.0;
      for (std::size_t i = 0; i < 8; ++i) {
        v += w[i] * lp[i];
        e += ent[i];
      }
      return v + beta * e / 8.0;
    };
    auto g = nn::log_prob_gradient(net, nn::evaluate_policy(net, s), a, w, beta);
    CHECK(testing::relative_error(g.values(), testing::numeric_gradient(net.params(), f)) < 1e-7);
  }
}

TEST_CASE("Fisher-vector product is symmetric and matches a KL-gradient difference") {
  Rng rng(10);
  for (Head h : {Head::kGaussianPolicy, Head::kCategoricalPolicy}) {
    CAPTURE(nn::head_name(h));
    MlpNet net(3, {5}, 3, h, rng);
    nn::ParamVector p = net.params();
    for (double& v : p.values()) v = 0.5 * rng.normal();
    net.set_params(p);
    Matrix s = random_matrix(10, 3, rng);
    auto out = nn::evaluate_policy(net, s);
    nn::ParamVector u = p.zeros_like(), v = p.zeros_like();
    for (double& x : u.values()) x = rng.normal();
    for (double& x : v.values()) x = rng.normal();

    CHECK(nn::dot(u, nn::fisher_vector_product(net, out, v, 0.0)) ==
          doctest::Approx(nn::dot(v, nn::fisher_vector_product(net, out, u, 0.0))).epsilon(1e-10));

    auto zero = nn::fisher_vector_product(net, out, p.zeros_like(), 0.1);
    for (double x : zero.values()) CHECK(x == 0.0);

    // Directional difference of grad KL(pi_theta || pi_ref) at theta = ref.
    const double eps = 1e-5;
    nn::ParamVector up = p, dn = p;
    nn::axpy(eps, v, up);
    nn::axpy(-eps, v, dn);
    MlpNet nu = with_params(net, up), nd = with_params(net, dn);
    auto gu = nn::kl_gradient(nu, nn::evaluate_policy(nu, s), out);
    auto gd = nn::kl_gradient(nd, nn::evaluate_policy(nd, s), out);
    std::vector<double> fd(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) fd[i] = (gu[i] - gd[i]) / (2 * eps);
    const double damping = 0.1;
    auto hv = nn::fisher_vector_product(net, out, v, damping);
    for (std::size_t i = 0; i < p.size(); ++i) fd[i] += damping * v[i];
    CHECK(testing::relative_error(hv.values(), fd) < 1e-4);
  }
}

TEST_CASE("sampled actions carry their own log-probability") {
  Rng rng(11);
  for (Head h : {Head::kGaussianPolicy, Head::kCategoricalPolicy}) {
    MlpNet net(2, {4}, 3, h, rng);
    std::vector<double> obs{0.2, -0.4};
    Rng a1(5), a2(5);
    auto s1 = nn::sample_action(net, obs, a1);
    auto s2 = nn::sample_action(net, obs, a2);
    CHECK(s1.action == s2.action);
    auto lp = nn::log_prob(nn::evaluate_policy(net, Matrix(1, 2, obs)), Matrix(1, s1.action.size(), s1.action));
    CHECK(lp[0] == doctest::Approx(s1.log_prob).epsilon(1e-12));
  }
}

TEST_CASE("Adam examples") {
  nn::ParamVector p(std::vector<nn::LayerShape>{{"w", 1, 3}}, {1.0, -2.0, 0.5});
  SUBCASE("zero gradient leaves params and decays moments") {
    nn::AdamState fresh(3, 0.1);
    CHECK(nn::adam_step(p, p.zeros_like(), fresh, nn::Direction::kDescent) == p);
    nn::AdamState st(3, 0.1);
    st.first_moment = {0.5, 0.5, 0.5};
    st.second_moment = {0.2, 0.2, 0.2};
    nn::adam_step(p, p.zeros_like(), st, nn::Direction::kDescent);
    CHECK(st.first_moment[0] == doctest::Approx(0.45));
    CHECK(st.second_moment[0] == doctest::Approx(0.2 * 0.999));
  }
  SUBCASE("first step moves each coordinate by about lr against the gradient sign") {
    nn::AdamState st(3, 0.01);
    nn::ParamVector g(p.manifest(), {3.0, -0.5, 100.0});
    auto q = nn::adam_step(p, g, st, nn::Direction::kDescent);
    CHECK(q[0] - p[0] == doctest::Approx(-0.01).epsilon(1e-6));
    CHECK(q[1] - p[1] == doctest::Approx(0.01).epsilon(1e-6));
    CHECK(q[2] - p[2] == doctest::Approx(-0.01).epsilon(1e-6));
    nn::AdamState up(3, 0.01);
    auto r = nn::adam_step(p, g, up, nn::Direction::kAscent);
    CHECK(r[0] - p[0] == doctest::Approx(0.01).epsilon(1e-6));
  }
  SUBCASE("minimises x^2") {
    nn::AdamState st(1, 0.1);
    double x = 1.0;
    for (int i = 0; i < 100; ++i) x = nn::adam_step(x, 2 * x, st, nn::Direction::kDescent);
    CHECK(std::abs(x) < 0.1);
  }
  SUBCASE("non-finite gradient leaves the state untouched") {
    nn::AdamState st(3, 0.1);
    std::vector<double> bad{0.0, std::numeric_limits<double>::infinity(), 0.0};
    nn::ParamVector g(p.manifest());
    g[1] = bad[1];
    CHECK_THROWS_AS(nn::adam_step(p, g, st, nn::Direction::kDescent), NonFiniteError);
    CHECK(st.step_count == 0);
  }
}

TEST_CASE("parameter vectors and checkpoints round-trip bit for bit") {
  Rng rng(12);
  MlpNet net(3, {4}, 2, Head::kGaussianPolicy, rng);
  std::stringstream ss;
  nn::write_param_vector(ss, net.params());
  CHECK(nn::read_param_vector(ss) == net.params());

  nn::Checkpoint c;
  c.vectors["policy"] = net.params();
  c.scalars["lambda"] = 0.1 + 0.2;
  std::stringstream cs;
  nn::write_checkpoint(cs, c);
  CHECK(nn::read_checkpoint(cs) == c);

  std::stringstream bad("XXXX");
  CHECK_THROWS_AS(nn::read_param_vector(bad), FormatError);
  std::string s = ss.str();
  std::stringstream cut(s.substr(0, s.size() / 2));
  CHECK_THROWS_AS(nn::read_param_vector(cut), FormatError);
}
