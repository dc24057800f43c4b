#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "omdp/envs.hpp"
#include "omdp/regret.hpp"
#include "omdp/stochastic_iter.hpp"

namespace omdp::cli {

/// Column layout of regret.csv (UTF-8, LF, one row per step).
inline constexpr const char* kRegretCsvHeader =
    "t,exp_reward_alg,rho_pi_t,rho_star_mean,cum_reward_alg,cum_reward_star,"
    "cum_regret,avg_regret";

/// Schema violation in a config or data document.
class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EnvironmentConfig {
  enum class Type { GridWorld, RandomMdp, MdpFile };
  Type type = Type::RandomMdp;
  GridWorldSpec grid;                 // GridWorld
  int n_states = 0, n_actions = 0;    // RandomMdp
  double mix_epsilon = 0.1;
  std::uint64_t seed = 0;
  std::string path;                   // MdpFile
};

struct MonteCarloConfig {
  int rollouts = 100;
  int length = 200;
};

struct TdOperatorConfig {
  std::string features = "tabular_minus_one";  // or "supergrid_indicators"
  std::int64_t iterations = 5000;
  AlphaSchedule alpha;
  double settle_tol = 0.0;  // 0 disables the early residual stop
};

struct AlgorithmConfig {
  double kappa = 1.0;
  std::string op = "exact";  // exact | monte_carlo | td
  StepSchedule schedule = StepSchedule::one_over_t();
  MonteCarloConfig monte_carlo;
  TdOperatorConfig td;
};

struct ExperimentConfig {
  EnvironmentConfig environment;
  AlgorithmConfig algorithm;
  std::int64_t horizon = 1;
  std::int64_t period = 1;            // reward_schedule.period
  std::uint64_t schedule_seed = 0;    // reward_schedule.seed
  std::uint64_t run_seed = 0;
  int initial_state = 0;
  std::int64_t snapshot_every = 0;    // 0: no policy snapshots
  std::string output_dir;             // may be overridden on the command line
};

/// Strict parse: every key must be known, required keys must be present,
/// seeds are always explicit in the document. Throws ConfigError.
ExperimentConfig parse_config(const nlohmann::json& doc);

/// Applies `--set path.to.key=value` overrides onto a raw config document.
void apply_overrides(nlohmann::json& doc, const std::vector<std::string>& sets);

/// Builds the environment named by the config (loads files if needed).
TabularMdp build_environment(const EnvironmentConfig& env);

/// Builds the reward schedule: super-grid draws for grid worlds, independent
/// per-entry draws otherwise.
RewardSchedule build_schedule(const ExperimentConfig& cfg, const TabularMdp& mdp);

// Command entry points (exit status: 0 ok, 1 runtime failure, 2 invalid input).
int cmd_run(const std::string& config_path, const std::vector<std::string>& overrides,
            const std::string& out_dir, int replicates);
int cmd_bound(const std::string& config_path, const std::vector<std::string>& overrides);
int cmd_plot(const std::string& run_dir);
int cmd_validate(const std::string& path);
int cmd_gridworld(const GridWorldSpec& spec, const std::string& out_path);

}  // namespace omdp::cli
