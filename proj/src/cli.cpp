#include "omdp/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include "omdp/io.hpp"
#include "report.hpp"

namespace omdp::cli {

namespace fs = std::filesystem;

namespace {

void check_keys(const nlohmann::json& doc, const std::string& where,
                std::initializer_list<const char*> required,
                std::initializer_list<const char*> optional = {}) {
  if (!doc.is_object()) throw ConfigError(where + ": expected an object");
  for (const char* key : required)
    if (!doc.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
  for (const auto& [key, value] : doc.items()) {
    bool known = false;
    for (const char* k : required) known = known || key == k;
    for (const char* k : optional) known = known || key == k;
    if (!known) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
T get_number(const nlohmann::json& doc, const std::string& where, const char* key) {
  if (!doc[key].is_number())
    throw ConfigError(where + "." + key + ": expected a number");
  return doc[key].get<T>();
}

EnvironmentConfig parse_environment(const nlohmann::json& doc) {
  EnvironmentConfig env;
  if (!doc.is_object() || !doc.contains("type"))
    throw ConfigError("environment: missing key 'type'");
  const std::string type = doc["type"].get<std::string>();
  if (type == "gridworld") {
    check_keys(doc, "environment", {"type", "width", "height", "slip", "super"},
               {"teleport_on_goal", "seed"});
    env.type = EnvironmentConfig::Type::GridWorld;
    env.grid.width = get_number<int>(doc, "environment", "width");
    env.grid.height = get_number<int>(doc, "environment", "height");
    env.grid.slip = get_number<double>(doc, "environment", "slip");
    env.grid.super = get_number<int>(doc, "environment", "super");
    if (doc.contains("teleport_on_goal"))
      env.grid.teleport_on_goal = doc["teleport_on_goal"].get<bool>();
    if (doc.contains("seed"))
      env.grid.seed = get_number<std::uint64_t>(doc, "environment", "seed");
  } else if (type == "random_mdp") {
    check_keys(doc, "environment", {"type", "n_states", "n_actions", "mix_epsilon", "seed"});
    env.type = EnvironmentConfig::Type::RandomMdp;
    env.n_states = get_number<int>(doc, "environment", "n_states");
    env.n_actions = get_number<int>(doc, "environment", "n_actions");
    env.mix_epsilon = get_number<double>(doc, "environment", "mix_epsilon");
    env.seed = get_number<std::uint64_t>(doc, "environment", "seed");
  } else if (type == "mdp_file") {
    check_keys(doc, "environment", {"type", "path"});
    env.type = EnvironmentConfig::Type::MdpFile;
    env.path = doc["path"].get<std::string>();
  } else {
    throw ConfigError("environment.type: unknown type '" + type + "'");
  }
  return env;
}

StepSchedule parse_schedule(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("type"))
    throw ConfigError("algorithm.schedule: missing key 'type'");
  const std::string type = doc["type"].get<std::string>();
  try {
    if (type == "one_over_t") {
      check_keys(doc, "algorithm.schedule", {"type"});
      return StepSchedule::one_over_t();
    }
    if (type == "power") {
      check_keys(doc, "algorithm.schedule", {"type", "c", "p"});
      return StepSchedule::power(get_number<double>(doc, "schedule", "c"),
                                 get_number<double>(doc, "schedule", "p"));
    }
    if (type == "constant") {
      check_keys(doc, "algorithm.schedule", {"type", "gamma"});
      return StepSchedule::constant(get_number<double>(doc, "schedule", "gamma"));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("algorithm.schedule: ") + e.what());
  }
  throw ConfigError("algorithm.schedule.type: unknown type '" + type + "'");
}

AlgorithmConfig parse_algorithm(const nlohmann::json& doc) {
  check_keys(doc, "algorithm", {"kappa"}, {"operator", "schedule", "monte_carlo", "td"});
  AlgorithmConfig alg;
  alg.kappa = get_number<double>(doc, "algorithm", "kappa");
  if (!(alg.kappa > 0.0)) throw ConfigError("algorithm.kappa: must be positive");
  if (doc.contains("operator")) alg.op = doc["operator"].get<std::string>();
  if (alg.op != "exact" && alg.op != "monte_carlo" && alg.op != "td")
    throw ConfigError("algorithm.operator: must be exact, monte_carlo or td");
  if (doc.contains("schedule")) alg.schedule = parse_schedule(doc["schedule"]);
  if (doc.contains("monte_carlo")) {
    if (alg.op != "monte_carlo")
      throw ConfigError("algorithm.monte_carlo: section requires operator=monte_carlo");
    check_keys(doc["monte_carlo"], "algorithm.monte_carlo", {"rollouts", "length"});
    alg.monte_carlo.rollouts = get_number<int>(doc["monte_carlo"], "monte_carlo", "rollouts");
    alg.monte_carlo.length = get_number<int>(doc["monte_carlo"], "monte_carlo", "length");
    if (alg.monte_carlo.rollouts < 1 || alg.monte_carlo.length < 1)
      throw ConfigError("algorithm.monte_carlo: rollouts and length must be >= 1");
  }
  if (doc.contains("td")) {
    if (alg.op != "td") throw ConfigError("algorithm.td: section requires operator=td");
    check_keys(doc["td"], "algorithm.td", {"features"},
               {"iterations", "alpha_scale", "alpha_offset", "alpha_exponent", "settle_tol"});
    alg.td.features = doc["td"]["features"].get<std::string>();
    if (alg.td.features != "tabular_minus_one" && alg.td.features != "supergrid_indicators")
      throw ConfigError("algorithm.td.features: unknown preset '" + alg.td.features + "'");
    if (doc["td"].contains("iterations"))
      alg.td.iterations = get_number<std::int64_t>(doc["td"], "td", "iterations");
    if (doc["td"].contains("alpha_scale"))
      alg.td.alpha.scale = get_number<double>(doc["td"], "td", "alpha_scale");
    if (doc["td"].contains("alpha_offset"))
      alg.td.alpha.offset = get_number<double>(doc["td"], "td", "alpha_offset");
    if (doc["td"].contains("alpha_exponent"))
      alg.td.alpha.exponent = get_number<double>(doc["td"], "td", "alpha_exponent");
    if (doc["td"].contains("settle_tol"))
      alg.td.settle_tol = get_number<double>(doc["td"], "td", "settle_tol");
  }
  return alg;
}

}  // namespace

ExperimentConfig parse_config(const nlohmann::json& doc) {
  check_keys(doc, "config",
             {"environment", "algorithm", "horizon", "reward_schedule", "run_seed"},
             {"initial_state", "snapshot_every", "output_dir"});
  ExperimentConfig cfg;
  cfg.environment = parse_environment(doc["environment"]);
  cfg.algorithm = parse_algorithm(doc["algorithm"]);
  cfg.horizon = get_number<std::int64_t>(doc, "config", "horizon");
  if (cfg.horizon < 1) throw ConfigError("horizon: must be >= 1");
  check_keys(doc["reward_schedule"], "reward_schedule", {"period", "seed"});
  cfg.period = get_number<std::int64_t>(doc["reward_schedule"], "reward_schedule", "period");
  if (cfg.period < 1) throw ConfigError("reward_schedule.period: must be >= 1");
  cfg.schedule_seed =
      get_number<std::uint64_t>(doc["reward_schedule"], "reward_schedule", "seed");
  cfg.run_seed = get_number<std::uint64_t>(doc, "config", "run_seed");
  if (doc.contains("initial_state"))
    cfg.initial_state = get_number<int>(doc, "config", "initial_state");
  if (doc.contains("snapshot_every"))
    cfg.snapshot_every = get_number<std::int64_t>(doc, "config", "snapshot_every");
  if (doc.contains("output_dir")) cfg.output_dir = doc["output_dir"].get<std::string>();

  if (cfg.algorithm.op == "td" && cfg.algorithm.td.features == "supergrid_indicators" &&
      cfg.environment.type != EnvironmentConfig::Type::GridWorld)
    throw ConfigError("algorithm.td.features: supergrid_indicators needs a gridworld");
  return cfg;
}

void apply_overrides(nlohmann::json& doc, const std::vector<std::string>& sets) {
  for (const auto& item : sets) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("--set expects key=value, got '" + item + "'");
    const std::string path = item.substr(0, eq);
    const std::string raw = item.substr(eq + 1);
    nlohmann::json value;
    try {
      value = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::parse_error&) {
      value = raw;  // plain string
    }
    nlohmann::json* node = &doc;
    std::size_t begin = 0;
    while (true) {
      const auto dot = path.find('.', begin);
      const std::string key = path.substr(begin, dot - begin);
      if (key.empty()) throw ConfigError("--set: empty key segment in '" + path + "'");
      if (dot == std::string::npos) {
        (*node)[key] = value;
        break;
      }
      node = &(*node)[key];
      begin = dot + 1;
    }
  }
}

TabularMdp build_environment(const EnvironmentConfig& env) {
  switch (env.type) {
    case EnvironmentConfig::Type::GridWorld:
      return make_gridworld(env.grid);
    case EnvironmentConfig::Type::RandomMdp:
      return make_random_mdp(env.n_states, env.n_actions, env.mix_epsilon, env.seed);
    case EnvironmentConfig::Type::MdpFile:
      return mdp_from_json(load_json_file(env.path));
  }
  throw ConfigError("environment: unreachable type");
}

RewardSchedule build_schedule(const ExperimentConfig& cfg, const TabularMdp& mdp) {
  if (cfg.environment.type == EnvironmentConfig::Type::GridWorld) {
    GridWorldSpec spec = cfg.environment.grid;
    spec.seed = cfg.schedule_seed;
    return make_reward_schedule(spec, cfg.horizon, cfg.period);
  }
  return make_iid_reward_schedule(mdp.n_states(), mdp.n_actions(), cfg.horizon,
                                  cfg.period, cfg.schedule_seed);
}

namespace {

nlohmann::json load_config_or_throw(const std::string& config_path,
                                    const std::vector<std::string>& overrides) {
  nlohmann::json doc;
  try {
    doc = load_json_file(config_path);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  apply_overrides(doc, overrides);
  return doc;
}

std::unique_ptr<EvalOperator> make_operator(const ExperimentConfig& cfg,
                                            const TabularMdp& mdp, std::uint64_t seed) {
  const std::uint64_t op_seed = seed ^ 0x9e3779b97f4a7c15ULL;
  if (cfg.algorithm.op == "monte_carlo")
    return std::make_unique<MonteCarloEvaluator>(cfg.algorithm.monte_carlo.rollouts,
                                                 cfg.algorithm.monte_carlo.length, op_seed);
  if (cfg.algorithm.op == "td") {
    FeatureMap features = cfg.algorithm.td.features == "supergrid_indicators"
                              ? supergrid_features(cfg.environment.grid)
                              : tabular_minus_one(mdp.n_states());
    return std::make_unique<TdEvaluator>(std::move(features), cfg.algorithm.td.iterations,
                                         op_seed, cfg.algorithm.td.alpha,
                                         cfg.algorithm.td.settle_tol);
  }
  return std::make_unique<ExactEvaluator>();
}

int run_one_replicate(const ExperimentConfig& cfg, const nlohmann::json& config_echo,
                      const TabularMdp& mdp, const RewardSchedule& schedule,
                      std::uint64_t seed, const fs::path& dir) {
  fs::create_directories(dir);
  const std::string started = timestamp_utc();
  std::string status = "ok";
  int exit_code = 0;

  RunOptions options;
  options.initial_dist =
      StateDistribution::point_mass(mdp.n_states(), cfg.initial_state).probs();
  options.record_policies = cfg.snapshot_every > 0;

  GibbsConfig gibbs{cfg.algorithm.kappa};
  RunTrace trace;
  const bool plain = cfg.algorithm.op == "exact" &&
                     cfg.algorithm.schedule.kind == StepSchedule::Kind::OneOverT;
  if (plain) {
    trace = run(mdp, schedule, cfg.horizon, gibbs, seed, options);
  } else {
    auto op = make_operator(cfg, mdp, seed);
    trace = si_run(mdp, schedule, cfg.horizon, gibbs, seed, *op,
                   cfg.algorithm.schedule, options);
  }
  if (!trace.completed) {
    status = "failed: " + trace.error;
    exit_code = 1;
  }

  if (trace.horizon() > 0) {
    try {
      const RegretCurve curve = regret_curve(mdp, trace, schedule, gibbs);
      write_regret_csv((dir / "regret.csv").string(), curve);
      std::cout << "steps=" << trace.horizon()
                << " offline_gain=" << curve.best_gain_on_mean
                << " final_avg_regret=" << curve.rows.back().avg_regret << "\n";
    } catch (const FixedPointDivergence& e) {
      status = std::string("failed: ") + e.what();
      exit_code = 1;
    }
  }
  if (trace.final_policy)
    save_json_file((dir / "final_policy.json").string(),
                   policy_to_json(*trace.final_policy));
  for (std::size_t i = 0; i < trace.policies.size(); ++i) {
    const std::int64_t t = static_cast<std::int64_t>(i) + 1;
    if (t % cfg.snapshot_every == 0) {
      char name[40];
      std::snprintf(name, sizeof(name), "policy_%08lld.json",
                    static_cast<long long>(t));
      save_json_file((dir / name).string(), policy_to_json(trace.policies[i]));
    }
  }
  save_json_file(
      (dir / "manifest.json").string(),
      build_manifest(dir.string(), config_echo, started, timestamp_utc(), status));
  return exit_code;
}

}  // namespace

int cmd_run(const std::string& config_path, const std::vector<std::string>& overrides,
            const std::string& out_dir, int replicates) {
  nlohmann::json doc;
  ExperimentConfig cfg;
  try {
    doc = load_config_or_throw(config_path, overrides);
    cfg = parse_config(doc);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (cfg.output_dir.empty())
      throw ConfigError("no output directory (set output_dir or pass --out)");
    if (replicates < 1) throw ConfigError("--replicates must be >= 1");
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    const TabularMdp mdp = build_environment(cfg.environment);
    const ValidationReport report = validate_mdp(mdp);
    if (!report.ok()) {
      std::cerr << "error: environment is not a valid MDP\n" << report.to_string();
      return 2;
    }
    const RewardSchedule schedule = build_schedule(cfg, mdp);

    int exit_code = 0;
    for (int r = 0; r < replicates; ++r) {
      fs::path dir = cfg.output_dir;
      if (replicates > 1) {
        char sub[16];
        std::snprintf(sub, sizeof(sub), "rep%03d", r);
        dir /= sub;
      }
      const int code =
          run_one_replicate(cfg, doc, mdp, schedule, cfg.run_seed + r, dir);
      exit_code = std::max(exit_code, code);
    }
    return exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 1;
  }
}

int cmd_bound(const std::string& config_path, const std::vector<std::string>& overrides) {
  ExperimentConfig cfg;
  try {
    cfg = parse_config(load_config_or_throw(config_path, overrides));
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    const TabularMdp mdp = build_environment(cfg.environment);
    const GibbsConfig gibbs{cfg.algorithm.kappa};
    const int samples = 128;
    Rng rng(cfg.run_seed);

    // empirical mixing estimate: worst contraction over sampled Gibbs policies
    std::vector<StochasticPolicy> policies;
    std::vector<RewardFunction> rewards;
    double worst_dobrushin = 0.0;
    for (int k = 0; k < samples; ++k) {
      Eigen::MatrixXd r(mdp.n_states(), mdp.n_actions());
      for (int s = 0; s < mdp.n_states(); ++s)
        for (int a = 0; a < mdp.n_actions(); ++a) r(s, a) = rng.uniform();
      Eigen::VectorXd v(mdp.n_states());
      for (int s = 0; s < mdp.n_states(); ++s) v(s) = rng.normal();
      RewardFunction reward(std::move(r));
      StochasticPolicy policy = improve(mdp, reward, v, gibbs);
      worst_dobrushin = std::max(
          worst_dobrushin, dobrushin_coefficient(induced_transition(mdp, policy)).dobrushin);
      policies.push_back(std::move(policy));
      rewards.push_back(std::move(reward));
    }
    if (worst_dobrushin >= 1.0) {
      std::cerr << "failure: environment is not mixing (contraction coefficient 1)\n";
      return 1;
    }
    const double tau =
        worst_dobrushin > 0.0 ? -1.0 / std::log(worst_dobrushin) : 0.0;

    double c_pi = 0.0;
    for (int k = 0; k < samples; ++k)
      c_pi = std::max(c_pi, contraction_constant_cpi(mdp, policies[k], rewards[k], tau));
    if (c_pi <= 0.0) c_pi = 1e-12;  // degenerate environments (zero q-values)

    const TheoryConstants constants =
        TheoryConstants::from_estimates(tau, gibbs.xi(), c_pi);
    std::cout << "empirical constants (sampled over " << samples << " policies):\n"
              << "  dobrushin = " << worst_dobrushin << "\n"
              << "  tau       = " << constants.tau << "\n"
              << "  xi        = " << constants.xi << "\n"
              << "  c_pi      = " << constants.c_pi << "\n"
              << "  c_v       = " << constants.c_v
              << (constants.sublinear() ? "  (sublinear regime, c_v < 1)"
                                        : "  (NOT sublinear, c_v >= 1)")
              << "\n"
              << "  c         = " << constants.c << "\n";
    for (const double horizon : {1e2, 1e3, 1e4})
      std::cout << "bound(T=" << horizon << ") = " << theorem1_bound(constants, horizon)
                << "\n";
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 1;
  }
}

namespace {

std::vector<double> downsample(const std::vector<double>& v, std::size_t cap) {
  if (v.size() <= cap) return v;
  std::vector<double> out;
  const std::size_t stride = (v.size() + cap - 1) / cap;
  for (std::size_t i = 0; i < v.size(); i += stride) out.push_back(v[i]);
  if ((v.size() - 1) % stride != 0) out.push_back(v.back());
  return out;
}

}  // namespace

int cmd_plot(const std::string& run_dir) {
  const fs::path dir(run_dir);
  try {
    const CsvTable table = read_csv((dir / "regret.csv").string());
    const int t_col = table.column("t");
    const int avg_col = table.column("avg_regret");
    const int alg_col = table.column("cum_reward_alg");
    const int star_col = table.column("cum_reward_star");
    if (t_col < 0 || avg_col < 0 || alg_col < 0 || star_col < 0)
      throw std::runtime_error("regret.csv: missing required columns");

    std::vector<double> t, avg, alg, star;
    for (const auto& row : table.rows) {
      t.push_back(row[t_col]);
      avg.push_back(row[avg_col]);
      alg.push_back(row[alg_col]);
      star.push_back(row[star_col]);
    }
    constexpr std::size_t kMaxPoints = 2000;
    write_line_svg((dir / "regret.svg").string(), "average regret",
                   downsample(t, kMaxPoints), downsample(avg, kMaxPoints));
    write_two_line_svg((dir / "reward.svg").string(), "cumulative expected reward",
                       downsample(t, kMaxPoints), downsample(alg, kMaxPoints),
                       "algorithm", downsample(star, kMaxPoints), "best offline");

    // policy arrows only make sense for grid runs
    const fs::path manifest_path = dir / "manifest.json";
    const fs::path policy_path = dir / "final_policy.json";
    if (fs::exists(manifest_path) && fs::exists(policy_path)) {
      const nlohmann::json manifest = load_json_file(manifest_path.string());
      const auto& env = manifest.at("config").at("environment");
      if (env.at("type").get<std::string>() == "gridworld") {
        const StochasticPolicy policy =
            policy_from_json(load_json_file(policy_path.string()));
        write_policy_svg((dir / "policy.svg").string(), policy,
                         env.at("width").get<int>(), env.at("height").get<int>());
      }
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_validate(const std::string& path) {
  try {
    const nlohmann::json doc = load_json_file(path);
    if (!doc.is_object()) {
      std::cerr << "error: expected a JSON object\n";
      return 2;
    }
    if (doc.contains("environment")) {
      parse_config(doc);
      std::cout << "config OK\n";
      return 0;
    }
    if (doc.contains("transition")) {
      const TabularMdp mdp = mdp_from_json(doc);
      const ValidationReport report = validate_mdp(mdp);
      if (!report.ok()) {
        std::cerr << "error: invalid MDP\n" << report.to_string();
        return 2;
      }
      std::cout << "mdp OK (" << mdp.n_states() << " states, " << mdp.n_actions()
                << " actions)\n";
      return 0;
    }
    if (doc.contains("values")) {
      reward_from_json(doc);
      std::cout << "reward OK\n";
      return 0;
    }
    if (doc.contains("probs")) {
      policy_from_json(doc);
      std::cout << "policy OK\n";
      return 0;
    }
    std::cerr << "error: unrecognized document (expected a config, mdp, reward or "
                 "policy)\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_gridworld(const GridWorldSpec& spec, const std::string& out_path) {
  try {
    const TabularMdp mdp = make_gridworld(spec);
    save_json_file(out_path, mdp_to_json(mdp));
    std::cout << "wrote " << out_path << " (" << mdp.n_states() << " states)\n";
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace omdp::cli
