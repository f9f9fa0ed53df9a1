#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ccil/common/errors.hpp"
#include "ccil/metrics/config.hpp"
#include "ccil/metrics/experiment.hpp"
#include "ccil/metrics/metrics.hpp"
#include "ccil/metrics/svg_plot.hpp"
#include "support.hpp"

using namespace ccil;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

learners::IterationRecord record(double r, double j) {
  learners::IterationRecord rec;
  rec.mean_true_return = r;
  rec.mean_cost = j;
  rec.episodes = 1;
  return rec;
}

metrics::RunConfig tiny_config(const std::filesystem::path& out) {
  metrics::RunConfig c;
  c.output_dir = out.string();
  c.iterations = 6;
  c.early_stop = false;
  c.checkpoint_every = 3;
  c.metric_window = 4;
  c.learner.hidden = {16};
  c.learner.batch_size = 200;
  c.expert_path = (out / "expert.jsonl").string();
  c.solver.hidden = {32};
  c.solver.batch_size = 1000;
  c.solver.max_iterations = 150;
  c.solver.window_episodes = 60;
  c.expert_budget = 50.0;
  return c;
}

}  // namespace

TEST_CASE("metric formula examples") {
  CHECK(metrics::penalized_return(8.0, 10.0, 3.0, 2.0) == doctest::Approx(0.8 - 1.2 * 0.5).epsilon(1e-15));
  CHECK(metrics::penalized_return(8.0, 10.0, 1.0, 2.0) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(metrics::penalized_return(8.0, 10.0, 3.0, 2.0, 2.0) == doctest::Approx(-0.2).epsilon(1e-14));
  CHECK(metrics::recovered_return(9.0, 10.0) == doctest::Approx(90.0).epsilon(1e-15));
  CHECK(metrics::recovered_return(-1.0, 10.0) == 0.0);
  CHECK(metrics::cost_violation(3.0, 2.0) == 1.0);
  CHECK(metrics::cost_violation(1.0, 2.0) == 0.0);
  CHECK(metrics::cost_rate(5.0, 100.0) == 0.05);
  CHECK_THROWS_AS(metrics::recovered_return(1.0, 0.0), ConfigError);
  CHECK_THROWS_AS(metrics::penalized_return(1.0, 1.0, 1.0, 0.0), ConfigError);
  CHECK_THROWS_AS(metrics::cost_rate(1.0, 0.0), ConfigError);
}

TEST_CASE("final metrics average the window") {
  std::vector<learners::IterationRecord> recs;
  for (int i = 0; i < 10; ++i) recs.push_back(record(i, 2.0 * i));
  auto m = metrics::final_metrics(recs, 10.0, 10.0, 1.2, 4);
  CHECK(m.r == 7.5);
  CHECK(m.j == 15.0);
  CHECK(m.window == 4);
  CHECK_FALSE(m.window_shrunk);
  CHECK(m.r_rec == 75.0);
  CHECK(m.cost_vio == 5.0);
  CHECK(m.r_pen == doctest::Approx(0.75 - 1.2 * 0.5).epsilon(1e-15));

  auto s = metrics::final_metrics(recs, 10.0, 10.0, 1.2, 100);
  CHECK(s.window == 10);
  CHECK(s.window_shrunk);
  CHECK(s.r == 4.5);

  auto z = metrics::final_metrics(recs, 10.0, 0.0, 1.2, 4);
  CHECK(std::isnan(z.r_pen));
  CHECK(z.cost_vio == 15.0);
}

TEST_CASE("mean and sample std") {
  std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  auto ms = metrics::mean_std(v);
  CHECK(ms.mean == 2.5);
  CHECK(ms.std == doctest::Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-15));
  std::vector<double> one{7.0};
  CHECK(metrics::mean_std(one).std == 0.0);
}

TEST_CASE("config parsing") {
  auto c = metrics::parse_config(R"(# comment
env.name = point
seeds = 0..2
[train]
batch_size = 123
[gae]
gamma = 0.9
)");
  CHECK(c.env_name == "point");
  CHECK(c.seeds == std::vector<std::uint64_t>{0, 1, 2});
  CHECK(c.learner.batch_size == 123);
  CHECK(c.learner.gamma == 0.9);
  CHECK_THROWS_AS(metrics::parse_config("nonsense.key = 1\n"), ConfigError);
  CHECK_THROWS_AS(metrics::parse_config("train.batch_size = many\n"), ConfigError);
  CHECK_THROWS_AS(metrics::parse_config("no equals sign\n"), ConfigError);
}

TEST_CASE("config serialization round trips") {
  metrics::RunConfig c;
  metrics::set_config_value(c, "network.hidden", "7,9");
  metrics::set_config_value(c, "discriminator.absorbing", "false");
  metrics::set_config_value(c, "lagrangian.initial", "0.25");
  c.seeds = {3, 5};
  auto back = metrics::parse_config(metrics::serialize_config(c));
  CHECK(back == c);
  CHECK(back.learner.hidden == std::vector<std::size_t>{7, 9});
  CHECK_FALSE(back.learner.discriminator.absorbing);
  CHECK(metrics::serialize_config(back) == metrics::serialize_config(c));
}

TEST_CASE("desk config loads") {
  auto c = metrics::load_config(std::filesystem::path(CCIL_SOURCE_DIR) / "configs" / "grid_desk.conf");
  CHECK(c.iterations == 300);
  CHECK(c.seeds.size() == 5);
  CHECK(c.learner.batch_size == 500);
  CHECK(c.budget() == 2.0);
}

TEST_CASE("seed lists") {
  CHECK(metrics::parse_seeds("0..4") == std::vector<std::uint64_t>{0, 1, 2, 3, 4});
  CHECK(metrics::parse_seeds("0,3,7") == std::vector<std::uint64_t>{0, 3, 7});
  CHECK(metrics::parse_seeds("5") == std::vector<std::uint64_t>{5});
  CHECK_THROWS_AS(metrics::parse_seeds("4..1"), ConfigError);
  CHECK_THROWS_AS(metrics::parse_seeds("a"), ConfigError);
}

TEST_CASE("progress rows") {
  auto header = metrics::progress_header();
  CHECK(header.find("iteration") != std::string::npos);
  auto row = metrics::progress_row(record(5.0, 1.0), 10.0, 2.0, 1.2);
  CHECK(std::count(row.begin(), row.end(), ',') == std::count(header.begin(), header.end(), ','));
}

TEST_CASE("svg plot renders") {
  std::vector<learners::IterationRecord> recs;
  for (int i = 0; i < 5; ++i) recs.push_back(record(i, 1.0));
  auto svg = metrics::render_progress_svg(recs, 1.0, "t");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("runs replay byte for byte and aggregate") {
  const auto out = std::filesystem::temp_directory_path() / "ccil_test_metrics";
  std::filesystem::remove_all(out);
  auto cfg = tiny_config(out);
  CHECK_THROWS_AS(metrics::obtain_expert(cfg, false), ConfigError);
  auto expert = metrics::obtain_expert(cfg, true);
  CHECK(std::filesystem::exists(cfg.expert_path));

  auto a = metrics::run_single(cfg, learners::Algorithm::kCcil, 1, expert, out / "a");
  auto b = metrics::run_single(cfg, learners::Algorithm::kCcil, 1, expert, out / "b");
  REQUIRE_FALSE(a.failed);
  REQUIRE_FALSE(b.failed);
  CHECK(a.records.size() == 6);
  CHECK(slurp(a.dir / "progress.csv") == slurp(b.dir / "progress.csv"));
  CHECK(std::filesystem::exists(a.dir / "metrics.json"));

  metrics::run_single(cfg, learners::Algorithm::kCcil, 2, expert, out / "a");
  auto rows = metrics::aggregate(out / "a");
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].seeds == 2);
  CHECK(rows[0].algorithm == "ccil");
  metrics::write_summary(out / "a", rows);
  CHECK(std::filesystem::exists(out / "a" / "summary.md"));
  CHECK(metrics::format_summary(rows).find("ccil") != std::string::npos);
  std::filesystem::remove_all(out);
}
