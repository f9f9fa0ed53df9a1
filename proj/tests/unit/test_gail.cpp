#include <doctest.h>

#include <cmath>

#include "ccil/common/errors.hpp"
#include "ccil/gail/discriminator.hpp"
#include "support.hpp"

using namespace ccil;

namespace {

// Zero every weight and put `logit` on the output bias so D is constant.
void make_constant(gail::Discriminator& disc, double logit) {
  nn::ParamVector p = disc.net().params().zeros_like();
  const std::size_t last = p.find_block("fc" + std::to_string(disc.net().num_layers() - 1) + ".bias");
  p.block(last)[0] = logit;
  disc.net().set_params(std::move(p));
}

nn::Matrix random_inputs(std::size_t n, std::size_t width, Rng& rng) {
  nn::Matrix x(n, width);
  for (double& v : x.data()) v = rng.normal();
  return x;
}

gail::Discriminator make_disc(Rng& rng, gail::DiscriminatorConfig cfg = {}) {
  return gail::Discriminator(3, env::ActionSpace::discrete(4), {6, 5}, rng, cfg);
}

}  // namespace

TEST_CASE("surrogate reward examples") {
  Rng rng(40);
  auto disc = make_disc(rng);
  nn::Matrix x = random_inputs(3, disc.input_dim(), rng);

  make_constant(disc, 0.0);
  for (double r : disc.surrogate_rewards(x)) CHECK(r == doctest::Approx(std::log(2.0)).epsilon(1e-15));

  make_constant(disc, -std::log(std::exp(1.0) - 1.0));  // D = 1/e
  for (double r : disc.surrogate_rewards(x)) CHECK(r == doctest::Approx(1.0).epsilon(1e-14));

  make_constant(disc, -100.0);
  for (double d : disc.probabilities(x)) CHECK(d == gail::kClampLow);
  for (double r : disc.surrogate_rewards(x)) CHECK(r == doctest::Approx(-std::log(gail::kClampLow)));

  make_constant(disc, 100.0);
  for (double d : disc.probabilities(x)) CHECK(d == gail::kClampHigh);
  for (double r : disc.surrogate_rewards(x)) CHECK(r > 0.0);
}

TEST_CASE("swapped convention uses -log(1 - D)") {
  Rng rng(41);
  gail::DiscriminatorConfig cfg;
  cfg.expert_positive = true;
  auto disc = make_disc(rng, cfg);
  make_constant(disc, std::log(std::exp(1.0) - 1.0));  // D = 1 - 1/e
  for (double r : disc.surrogate_rewards(random_inputs(2, disc.input_dim(), rng)))
    CHECK(r == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("discriminator loss examples") {
  std::vector<double> half{0.5, 0.5};
  CHECK(gail::discriminator_loss(half, half) == doctest::Approx(-1.3862943611198906).epsilon(1e-14));
  std::vector<double> dl{0.8}, de{0.2, 0.4};
  // log 0.8 + (log 0.8 + log 0.6) / 2
  CHECK(gail::discriminator_loss(dl, de) == doctest::Approx(-0.5901281388543099).epsilon(1e-13));
  std::vector<double> a{0.3}, b{0.9};
  CHECK(gail::discriminator_loss(a, b) == doctest::Approx(std::log(0.3) + std::log(0.1)).epsilon(1e-14));
  CHECK(gail::discriminator_loss(a, b, true) == doctest::Approx(std::log(0.9) + std::log(0.7)).epsilon(1e-14));
  std::vector<double> none;
  CHECK_THROWS_AS(gail::discriminator_loss(none, half), ShapeError);
}

TEST_CASE("discriminator gradient matches central differences") {
  Rng rng(42);
  for (bool swap : {false, true}) {
    for (int trial = 0; trial < 5; ++trial) {
      gail::DiscriminatorConfig cfg;
      cfg.expert_positive = swap;
      cfg.entropy_weight = 0.1;
      auto disc = make_disc(rng, cfg);
      nn::Matrix learner = random_inputs(7, disc.input_dim(), rng);
      nn::Matrix expert = random_inputs(5, disc.input_dim(), rng);
      auto g = gail::discriminator_gradient(disc, learner, expert);
      auto f = [&](const nn::ParamVector& p) {
        gail::Discriminator d = disc;
        d.net().set_params(p);
        return gail::discriminator_objective(d, learner, expert);
      };
      CHECK(testing::relative_error(g.values(), testing::numeric_gradient(disc.net().params(), f)) < 1e-7);
    }
  }
}

TEST_CASE("discriminator update ascends") {
  Rng rng(43);
  gail::DiscriminatorConfig cfg;
  cfg.learning_rate = 1e-2;
  auto disc = make_disc(rng, cfg);
  nn::Matrix learner = random_inputs(32, disc.input_dim(), rng);
  nn::Matrix expert = random_inputs(32, disc.input_dim(), rng);
  for (double& v : expert.data()) v += 1.0;
  const double start = gail::discriminator_objective(disc, learner, expert);
  for (int i = 0; i < 50; ++i) gail::discriminator_update(disc, learner, expert);
  CHECK(gail::discriminator_objective(disc, learner, expert) > start);
  // Learner pairs get higher D, so lower surrogate reward.
  double rl = 0.0, re = 0.0;
  for (double r : disc.surrogate_rewards(learner)) rl += r;
  for (double r : disc.surrogate_rewards(expert)) re += r;
  CHECK(rl < re);
}

TEST_CASE("zero learning rate leaves the discriminator unchanged") {
  Rng rng(44);
  gail::DiscriminatorConfig cfg;
  cfg.learning_rate = 0.0;
  auto disc = make_disc(rng, cfg);
  const nn::ParamVector before = disc.net().params();
  gail::discriminator_update(disc, random_inputs(4, disc.input_dim(), rng), random_inputs(4, disc.input_dim(), rng));
  CHECK(disc.net().params() == before);
}

TEST_CASE("encoding and absorbing rows") {
  Rng rng(45);
  auto disc = make_disc(rng);
  CHECK(disc.input_dim() == 3 + 4 + 1);
  nn::Matrix obs(2, 3, std::vector<double>{1, 2, 3, 4, 5, 6});
  nn::Matrix act(2, 1, std::vector<double>{2, 0});
  nn::Matrix x = disc.encode(obs, act);
  CHECK(x.rows() == 2);
  CHECK(x(0, 0) == 1.0);
  CHECK(x(0, 3 + 2) == 1.0);
  CHECK(x(1, 3 + 0) == 1.0);
  CHECK(x(0, 7) == 0.0);
  nn::Matrix a = disc.absorbing_inputs(3);
  CHECK(a.rows() == 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) CHECK(a(i, j) == (j == 7 ? 1.0 : 0.0));

  nn::Matrix bad(2, 1, std::vector<double>{4, 0});
  CHECK_THROWS_AS(disc.encode(obs, bad), ShapeError);

  gail::DiscriminatorConfig off;
  off.absorbing = false;
  auto plain = make_disc(rng, off);
  CHECK(plain.input_dim() == 7);
  CHECK_THROWS_AS(plain.absorbing_inputs(1), ConfigError);
}

TEST_CASE("continuous actions are concatenated raw") {
  Rng rng(46);
  gail::Discriminator disc(2, env::ActionSpace::box(2, -1.0, 1.0), {4}, rng);
  nn::Matrix obs(1, 2, std::vector<double>{0.1, 0.2});
  nn::Matrix act(1, 2, std::vector<double>{-0.3, 0.4});
  nn::Matrix x = disc.encode(obs, act);
  CHECK(std::vector<double>(x.row(0).begin(), x.row(0).end()) == std::vector<double>{0.1, 0.2, -0.3, 0.4, 0.0});
}

TEST_CASE("causal entropy examples") {
  Rng rng(47);
  nn::MlpNet uniform(2, {3}, 4, nn::Head::kCategoricalPolicy, rng);
  uniform.set_params(uniform.params().zeros_like());
  nn::Matrix states(5, 2, 0.3);
  CHECK(gail::causal_entropy(uniform, states).value == doctest::Approx(std::log(4.0)).epsilon(1e-14));

  nn::MlpNet gauss(2, {3}, 2, nn::Head::kGaussianPolicy, rng);
  gauss.set_params(gauss.params().zeros_like());  // log_std = 0
  const double h = std::log(2.0 * M_PI * std::exp(1.0));
  CHECK(gail::causal_entropy(gauss, states).value == doctest::Approx(h).epsilon(1e-14));
  CHECK_THROWS_AS(gail::causal_entropy(gauss, nn::Matrix(0, 2)), ShapeError);
}
