#include "ccil/metrics/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "ccil/common/errors.hpp"

namespace ccil::metrics {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

std::string fmt(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double to_double(const std::string& s) {
  double v = 0.0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw ConfigError("expected a number, got '" + s + "'");
  return v;
}

std::uint64_t to_u64(const std::string& s) {
  std::uint64_t v = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw ConfigError("expected a nonnegative integer, got '" + s + "'");
  }
  return v;
}

int to_int(const std::string& s) {
  int v = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw ConfigError("expected an integer, got '" + s + "'");
  return v;
}

bool to_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("expected true or false, got '" + s + "'");
}

std::string join_sizes(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::vector<std::size_t> to_sizes(const std::string& s) {
  std::vector<std::size_t> v;
  for (const auto& p : split(s, ',')) v.push_back(to_u64(p));
  return v;
}

std::string cell_str(env::Cell c) { return std::to_string(c.x) + "," + std::to_string(c.y); }

env::Cell to_cell(const std::string& s) {
  auto p = split(s, ',');
  if (p.size() != 2) throw ConfigError("expected a cell 'x,y', got '" + s + "'");
  return {to_int(p[0]), to_int(p[1])};
}

std::string cells_str(const std::vector<env::Cell>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + cell_str(v[i]);
  return s;
}

std::vector<env::Cell> to_cells(const std::string& s) {
  std::vector<env::Cell> v;
  for (const auto& p : split(s, ';')) v.push_back(to_cell(p));
  return v;
}

std::string point_str(std::array<double, 2> p) { return fmt(p[0]) + "," + fmt(p[1]); }

std::array<double, 2> to_point(const std::string& s) {
  auto p = split(s, ',');
  if (p.size() != 2) throw ConfigError("expected a point 'x,y', got '" + s + "'");
  return {to_double(p[0]), to_double(p[1])};
}

std::string circles_str(const std::vector<env::Circle>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    s += (i ? ";" : "") + point_str(v[i].center) + "," + fmt(v[i].radius);
  }
  return s;
}

std::vector<env::Circle> to_circles(const std::string& s) {
  std::vector<env::Circle> v;
  for (const auto& c : split(s, ';')) {
    auto p = split(c, ',');
    if (p.size() != 3) throw ConfigError("expected a circle 'x,y,r', got '" + c + "'");
    v.push_back({{to_double(p[0]), to_double(p[1])}, to_double(p[2])});
  }
  return v;
}

std::string seeds_str(const std::vector<std::uint64_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

struct Field {
  const char* key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

#define CCIL_DOUBLE(KEY, MEMBER) \
  Field{KEY, [](const RunConfig& c) { return fmt(c.MEMBER); }, [](RunConfig& c, const std::string& v) { c.MEMBER = to_double(v); }}
#define CCIL_SIZE(KEY, MEMBER)                                        \
  Field{KEY, [](const RunConfig& c) { return std::to_string(c.MEMBER); }, \
        [](RunConfig& c, const std::string& v) { c.MEMBER = static_cast<decltype(c.MEMBER)>(to_u64(v)); }}
#define CCIL_INT(KEY, MEMBER) \
  Field{KEY, [](const RunConfig& c) { return std::to_string(c.MEMBER); }, [](RunConfig& c, const std::string& v) { c.MEMBER = to_int(v); }}
#define CCIL_BOOL(KEY, MEMBER)                                                    \
  Field{KEY, [](const RunConfig& c) { return std::string(c.MEMBER ? "true" : "false"); }, \
        [](RunConfig& c, const std::string& v) { c.MEMBER = to_bool(v); }}
#define CCIL_HIDDEN(KEY, MEMBER) \
  Field{KEY, [](const RunConfig& c) { return join_sizes(c.MEMBER); }, [](RunConfig& c, const std::string& v) { c.MEMBER = to_sizes(v); }}

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      Field{"algorithm", [](const RunConfig& c) { return std::string(learners::algorithm_name(c.algorithm)); },
            [](RunConfig& c, const std::string& v) { c.algorithm = learners::parse_algorithm(v); }},
      Field{"seeds", [](const RunConfig& c) { return seeds_str(c.seeds); },
            [](RunConfig& c, const std::string& v) { c.seeds = parse_seeds(v); }},
      Field{"output_dir", [](const RunConfig& c) { return c.output_dir; },
            [](RunConfig& c, const std::string& v) { c.output_dir = v; }},
      CCIL_SIZE("iterations", iterations),
      CCIL_BOOL("stop.enabled", early_stop),
      CCIL_DOUBLE("stop.recovered_return", stop_recovered_return),
      CCIL_SIZE("stop.patience", stop_patience),
      CCIL_SIZE("checkpoint.every", checkpoint_every),
      CCIL_DOUBLE("metrics.kappa", kappa),
      CCIL_SIZE("metrics.window", metric_window),
      CCIL_BOOL("metrics.plots", plots),

      Field{"env.name", [](const RunConfig& c) { return c.env_name; },
            [](RunConfig& c, const std::string& v) { c.env_name = v; }},
      CCIL_SIZE("env.seed", env_seed),
      CCIL_INT("env.grid.width", grid.width),
      CCIL_INT("env.grid.height", grid.height),
      Field{"env.grid.start", [](const RunConfig& c) { return cell_str(c.grid.start); },
            [](RunConfig& c, const std::string& v) { c.grid.start = to_cell(v); }},
      Field{"env.grid.goal", [](const RunConfig& c) { return cell_str(c.grid.goal); },
            [](RunConfig& c, const std::string& v) { c.grid.goal = to_cell(v); }},
      Field{"env.grid.hazards", [](const RunConfig& c) { return cells_str(c.grid.hazards); },
            [](RunConfig& c, const std::string& v) { c.grid.hazards = to_cells(v); }},
      CCIL_DOUBLE("env.grid.slip_probability", grid.slip_probability),
      CCIL_INT("env.grid.horizon", grid.horizon),
      CCIL_DOUBLE("env.point.arena_radius", point.arena_radius),
      Field{"env.point.start", [](const RunConfig& c) { return point_str(c.point.start); },
            [](RunConfig& c, const std::string& v) { c.point.start = to_point(v); }},
      Field{"env.point.goal", [](const RunConfig& c) { return point_str(c.point.goal); },
            [](RunConfig& c, const std::string& v) { c.point.goal = to_point(v); }},
      CCIL_DOUBLE("env.point.goal_radius", point.goal_radius),
      Field{"env.point.hazards", [](const RunConfig& c) { return circles_str(c.point.hazards); },
            [](RunConfig& c, const std::string& v) { c.point.hazards = to_circles(v); }},
      CCIL_INT("env.point.horizon", point.horizon),
      Field{"env.cost_variant", [](const RunConfig& c) { return std::string(env::cost_variant_name(c.point.cost_variant)); },
            [](RunConfig& c, const std::string& v) { c.point.cost_variant = env::parse_cost_variant(v); }},
      CCIL_DOUBLE("env.safety_coefficient", point.safety_coefficient),

      CCIL_HIDDEN("network.hidden", learner.hidden),
      CCIL_SIZE("train.batch_size", learner.batch_size),
      CCIL_SIZE("train.generator_steps", learner.generator_steps),
      CCIL_SIZE("train.discriminator_steps", learner.discriminator_steps),
      CCIL_DOUBLE("gae.gamma", learner.gamma),
      CCIL_DOUBLE("gae.lambda", learner.gae_lambda),
      CCIL_DOUBLE("trpo.max_kl", learner.trust_region.max_kl),
      CCIL_SIZE("trpo.cg_iterations", learner.trust_region.cg_iterations),
      CCIL_DOUBLE("trpo.cg_residual_tol", learner.trust_region.cg_residual_tol),
      CCIL_DOUBLE("trpo.backtrack_ratio", learner.trust_region.backtrack_ratio),
      CCIL_SIZE("trpo.max_backtracks", learner.trust_region.max_backtracks),
      CCIL_DOUBLE("trpo.damping", learner.trust_region.damping),
      CCIL_DOUBLE("policy.entropy", learner.policy_entropy),
      CCIL_DOUBLE("value.learning_rate", learner.value_lr),
      CCIL_SIZE("value.minibatch", learner.value_minibatch),
      CCIL_DOUBLE("discriminator.learning_rate", learner.discriminator.learning_rate),
      CCIL_DOUBLE("discriminator.entropy", learner.discriminator.entropy_weight),
      CCIL_BOOL("discriminator.expert_positive", learner.discriminator.expert_positive),
      CCIL_BOOL("discriminator.absorbing", learner.discriminator.absorbing),
      CCIL_DOUBLE("lagrangian.initial", learner.lambda_init),
      CCIL_DOUBLE("lagrangian.learning_rate", learner.lambda_lr),
      Field{"lagrangian.mode",
            [](const RunConfig& c) { return std::string(c.learner.lambda_mode == learners::LambdaMode::kAdam ? "adam" : "plain"); },
            [](RunConfig& c, const std::string& v) {
              if (v == "plain") c.learner.lambda_mode = learners::LambdaMode::kPlain;
              else if (v == "adam") c.learner.lambda_mode = learners::LambdaMode::kAdam;
              else throw ConfigError("lagrangian.mode must be plain or adam");
            }},
      CCIL_DOUBLE("meta.learning_rate", learner.meta_lr),
      CCIL_DOUBLE("meta.train_fraction", learner.meta_train_fraction),
      CCIL_DOUBLE("lgail.fraction", learner.lgail_fraction),

      CCIL_SIZE("bc.epochs", bc.epochs),
      CCIL_DOUBLE("bc.learning_rate", bc.learning_rate),
      CCIL_SIZE("bc.minibatch", bc.minibatch),
      CCIL_DOUBLE("bc.train_fraction", bc.train_fraction),

      Field{"expert.path", [](const RunConfig& c) { return c.expert_path; },
            [](RunConfig& c, const std::string& v) { c.expert_path = v; }},
      Field{"expert.budget", [](const RunConfig& c) { return c.expert_budget ? fmt(*c.expert_budget) : std::string(); },
            [](RunConfig& c, const std::string& v) {
              if (v.empty()) c.expert_budget.reset();
              else c.expert_budget = to_double(v);
            }},
      CCIL_SIZE("expert.seed", expert_seed),
      CCIL_SIZE("expert.episodes", expert_episodes),
      CCIL_HIDDEN("expert.solver.hidden", solver.hidden),
      CCIL_SIZE("expert.solver.batch_size", solver.batch_size),
      CCIL_SIZE("expert.solver.max_iterations", solver.max_iterations),
      CCIL_SIZE("expert.solver.min_iterations", solver.min_iterations),
      CCIL_DOUBLE("expert.solver.gamma", solver.gamma),
      CCIL_DOUBLE("expert.solver.max_kl", solver.max_kl),
      CCIL_DOUBLE("expert.solver.lambda_learning_rate", solver.lambda_lr),
      CCIL_SIZE("expert.solver.window_episodes", solver.window_episodes),
      CCIL_DOUBLE("expert.solver.plateau_tolerance", solver.plateau_tolerance),
  };
  return f;
}

#undef CCIL_DOUBLE
#undef CCIL_SIZE
#undef CCIL_INT
#undef CCIL_BOOL
#undef CCIL_HIDDEN

}  // namespace

double RunConfig::budget() const {
  if (expert_budget) return *expert_budget;
  return env_name == "point" ? 10.0 : 2.0;
}

std::uint64_t RunConfig::master_seed(std::uint64_t seed) const {
  return env_seed == 0 ? seed : seed ^ (env_seed * 0x9e3779b97f4a7c15ULL);
}

void RunConfig::validate() const {
  if (env_name != "grid" && env_name != "point") throw ConfigError("env.name must be grid or point");
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (iterations == 0) throw ConfigError("iterations must be positive");
  if (metric_window == 0) throw ConfigError("metrics.window must be positive");
  if (algorithm != learners::Algorithm::kBc) learner.validate();
  grid.validate();
  point.validate();
}

void set_config_value(RunConfig& config, const std::string& key, const std::string& value) {
  for (const Field& f : fields()) {
    if (key == f.key) {
      try {
        f.set(config, value);
      } catch (const ConfigError& e) {
        throw ConfigError(key + ": " + e.what());
      }
      return;
    }
  }
  throw ConfigError("unknown config key '" + key + "'");
}

RunConfig parse_config(std::string_view text) {
  RunConfig c;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    if (!section.empty()) key = section + "." + key;
    try {
      set_config_value(c, key, trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& config) {
  std::string out;
  for (const Field& f : fields()) out += std::string(f.key) + " = " + f.get(config) + "\n";
  return out;
}

std::vector<std::uint64_t> parse_seeds(const std::string& s) {
  const std::string t = trim(s);
  std::vector<std::uint64_t> out;
  const auto dots = t.find("..");
  if (dots != std::string::npos) {
    const auto lo = to_u64(trim(t.substr(0, dots)));
    const auto hi = to_u64(trim(t.substr(dots + 2)));
    if (hi < lo) throw ConfigError("seed range '" + s + "' is empty");
    for (auto v = lo; v <= hi; ++v) out.push_back(v);
    return out;
  }
  for (const auto& p : split(t, ',')) out.push_back(to_u64(p));
  if (out.empty()) throw ConfigError("no seeds in '" + s + "'");
  return out;
}

std::unique_ptr<env::Environment> make_environment(const RunConfig& config) {
  if (config.env_name == "grid") {
    env::GridHazardSpec g = config.grid;
    g.discount = config.learner.gamma;
    return std::make_unique<env::GridHazardEnv>(g);
  }
  if (config.env_name == "point") {
    env::PointHazardSpec p = config.point;
    p.discount = config.learner.gamma;
    return std::make_unique<env::PointHazardEnv>(p);
  }
  throw ConfigError("unknown environment '" + config.env_name + "' (expected grid or point)");
}

}  // namespace ccil::metrics
