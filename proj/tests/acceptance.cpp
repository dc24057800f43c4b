// Acceptance suite: one criterion per entry, each printing a pass/fail line.
// Run with no arguments for the full suite or with a criterion number.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include "omdp/cli.hpp"
#include "omdp/envs.hpp"
#include "omdp/io.hpp"
#include "omdp/regret.hpp"
#include "omdp/stochastic_iter.hpp"
#include "omdp/td.hpp"
#include "oracles.hpp"

using namespace omdp;
namespace fs = std::filesystem;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream log;
  void expect(bool condition, const std::string& what) {
    if (!condition) {
      ok = false;
      log << "    violated: " << what << "\n";
    }
  }
};

// ---------------------------------------------------------------- criterion 1
bool exact_evaluation_suite(Check& check) {
  for (int trial = 0; trial < 100; ++trial) {
    Rng rng(9000 + trial);
    const int n = 2 + rng.below(19);   // |S| <= 20
    const int m = 1 + rng.below(5);    // |A| <= 5
    const TabularMdp mdp = make_random_mdp(n, m, 0.05, 9100 + trial);
    const double kappa = 0.1 + 2.0 * rng.uniform();
    const StochasticPolicy policy = oracles::random_gibbs_policy(mdp, rng, kappa);
    const RewardFunction reward = oracles::random_reward(rng, n, m);

    const PolicyEvaluation eval = evaluate_policy(mdp, policy, reward);
    const Eigen::MatrixXd p = induced_transition(mdp, policy);
    const Eigen::VectorXd r_pi =
        (policy.probs().cwiseProduct(reward.values())).rowwise().sum();
    const double bellman =
        (eval.value - (r_pi.array() - eval.gain).matrix() - p * eval.value)
            .cwiseAbs()
            .maxCoeff();
    const double centering = std::abs(eval.stationary.probs().dot(eval.value));
    const double stationarity =
        (p.transpose() * eval.stationary.probs() - eval.stationary.probs())
            .cwiseAbs()
            .sum();
    const double gain_consistency =
        std::abs(eval.gain - eval.stationary.probs().dot(r_pi));
    check.expect(bellman <= 1e-8, "Bellman residual " + std::to_string(bellman));
    check.expect(centering <= 1e-10, "centering " + std::to_string(centering));
    check.expect(stationarity <= 1e-10, "stationarity " + std::to_string(stationarity));
    check.expect(gain_consistency <= 1e-10,
                 "gain consistency " + std::to_string(gain_consistency));
  }
  return check.ok;
}

// ---------------------------------------------------------------- criterion 2
bool gibbs_lipschitz_suite(Check& check) {
  for (int trial = 0; trial < 1000; ++trial) {
    Rng rng(11000 + trial);
    const int n = 2 + rng.below(6);
    const int m = 2 + rng.below(3);
    const TabularMdp mdp = make_random_mdp(n, m, 0.1, 11500 + trial);
    const double kappa = 0.05 * std::pow(10.0 / 0.05, rng.uniform());  // [0.05, 10]
    const GibbsConfig cfg{kappa};
    const RewardFunction r1 = oracles::random_reward(rng, n, m);
    const RewardFunction r2 = oracles::random_reward(rng, n, m);
    const Eigen::VectorXd v1 = oracles::random_value(rng, n, 2.0);
    const Eigen::VectorXd v2 = oracles::random_value(rng, n, 2.0);
    const double gap1 = assumption1_gap(mdp, r1, v1, v2, cfg);
    const double gap2 = assumption2_gap(mdp, r1, r2, v1, cfg);
    check.expect(gap1 <= 1e-12, "assumption1 gap " + std::to_string(gap1));
    check.expect(gap2 <= 1e-12, "assumption2 gap " + std::to_string(gap2));
  }
  return check.ok;
}

// ---------------------------------------------------------------- criterion 3
bool running_mean_identity(Check& check) {
  const TabularMdp mdp = make_random_mdp(8, 3, 0.1, 12000);
  const RewardSchedule rewards = make_iid_reward_schedule(8, 3, 2000, 1, 12001);
  RunOptions options;
  options.record_policies = true;
  options.record_values = true;
  const RunTrace trace = run(mdp, rewards, 2000, GibbsConfig{0.5}, 12, options);
  check.expect(trace.completed, "run aborted: " + trace.error);
  if (!trace.completed) return false;

  Eigen::VectorXd sum = Eigen::VectorXd::Zero(8);
  double worst = 0.0;
  for (std::int64_t t = 1; t <= 2000; ++t) {
    sum += evaluate_policy(mdp, trace.policies[t - 1], rewards.at(t)).value;
    const double gap =
        (trace.values[t - 1] - sum / static_cast<double>(t)).cwiseAbs().maxCoeff();
    worst = std::max(worst, gap);
  }
  check.log << "    max deviation " << worst << "\n";
  check.expect(worst <= 1e-10, "running-mean deviation " + std::to_string(worst));
  return check.ok;
}

// ---------------------------------------------------------------- criterion 4
bool stochastic_iteration_equivalence(Check& check) {
  const TabularMdp mdp = make_random_mdp(6, 3, 0.15, 13000);
  const RewardSchedule rewards = make_iid_reward_schedule(6, 3, 1000, 25, 13001);
  RunOptions options;
  options.record_values = true;
  const RunTrace plain = run(mdp, rewards, 1000, GibbsConfig{0.6}, 21, options);
  ExactEvaluator exact;
  const RunTrace si = si_run(mdp, rewards, 1000, GibbsConfig{0.6}, 21, exact,
                             StepSchedule::one_over_t(), options);
  check.expect(plain.completed && si.completed, "a run aborted");
  if (!check.ok) return false;

  double worst = 0.0;
  for (std::size_t i = 0; i < 1000; ++i) {
    check.expect(plain.steps[i].state == si.steps[i].state, "sampled states diverged");
    check.expect(plain.steps[i].action == si.steps[i].action, "sampled actions diverged");
    worst = std::max(worst, (plain.values[i] - si.values[i]).cwiseAbs().maxCoeff());
    worst = std::max(worst,
                     std::abs(plain.steps[i].expected_reward - si.steps[i].expected_reward));
    worst = std::max(worst, std::abs(plain.steps[i].gain_pi_t - si.steps[i].gain_pi_t));
  }
  check.log << "    max per-step deviation " << worst << "\n";
  check.expect(worst <= 1e-12, "per-step deviation " + std::to_string(worst));
  return check.ok;
}

// ---------------------------------------------------------------- criterion 5
bool td_convergence_suite(Check& check) {
  const TabularMdp mdp = make_random_mdp(5, 3, 0.1, 11);
  Rng inst_rng(32);
  const StochasticPolicy policy = oracles::random_policy(inst_rng, 5, 3);
  const RewardFunction reward = oracles::random_reward(inst_rng, 5, 3);
  const FeatureMap features = tabular_minus_one(5);
  const PolicyEvaluation eval = evaluate_policy(mdp, policy, reward);
  const ProjectedFixedPoint fp = projected_fixed_point(mdp, policy, reward, features);
  const Eigen::VectorXd target = features.matrix() * fp.theta;

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    TdState state = init_td(features, AlphaSchedule{1.0, 100.0, 0.8});
    Rng rng(seed);
    int s = 0;
    for (int i = 0; i < 200000; ++i) {
      const int a = rng.categorical(policy.probs().row(s));
      const int next = rng.categorical(mdp.kernel(a).row(s));
      td_step(state, features, {s, a, reward(s, a), next});
      s = next;
    }
    const double err = d_weighted_norm(features.matrix() * state.theta - target,
                                       eval.stationary.probs());
    const double rho_err = std::abs(state.rho_hat - eval.gain);
    check.log << "    seed " << seed << ": value error " << err << ", gain error "
              << rho_err << "\n";
    check.expect(err <= 0.05, "seed " + std::to_string(seed) + " value error");
    check.expect(rho_err <= 0.02, "seed " + std::to_string(seed) + " gain error");
  }

  int held = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const TabularMdp inst = make_random_mdp(8, 2, 0.05, 5000 + trial);
    Rng rng(6000 + trial);
    const StochasticPolicy pi = oracles::random_gibbs_policy(inst, rng, 0.5);
    const RewardFunction r = oracles::random_reward(rng, 8, 2);
    Eigen::MatrixXd phi(8, 3);
    for (int row = 0; row < 8; ++row)
      for (int k = 0; k < 3; ++k) phi(row, k) = rng.normal();
    const double tau = dobrushin_coefficient(induced_transition(inst, pi)).tau;
    const ErrorBoundReport report =
        error_bound_check(inst, pi, r, FeatureMap{std::move(phi)}, tau);
    if (report.holds) ++held;
  }
  check.log << "    error bound held on " << held << "/50 instances\n";
  check.expect(held == 50, "error bound violated on some instance");
  return check.ok;
}

// ---------------------------------------------------------------- criterion 6
bool sublinear_regret_random(Check& check) {
  std::vector<double> early, late, slopes;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const TabularMdp mdp = make_random_mdp(10, 4, 0.1, 14000 + seed);
    const RewardSchedule rewards =
        make_iid_reward_schedule(10, 4, 20000, 100, 14100 + seed);
    const RunTrace trace = run(mdp, rewards, 20000, GibbsConfig{0.2}, seed);
    check.expect(trace.completed, "run aborted");
    if (!trace.completed) return false;
    const RegretCurve curve = regret_curve(mdp, trace, rewards, GibbsConfig{0.2});

    early.push_back(curve.rows[199].avg_regret);
    late.push_back(curve.rows[19999].avg_regret);

    // least-squares slope of log cumulative regret against log t
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int count = 0;
    for (std::int64_t t = 1000; t <= 20000; ++t) {
      const double value = curve.rows[t - 1].cum_regret;
      if (value <= 0.0) continue;
      const double x = std::log(static_cast<double>(t)), y = std::log(value);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++count;
    }
    check.expect(count > 100, "not enough positive-regret points for the slope fit");
    const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    slopes.push_back(slope);
    check.log << "    seed " << seed << ": avg regret " << early.back() << " @200 -> "
              << late.back() << " @20000, slope " << slope << "\n";
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };
  check.expect(median(late) <= 0.5 * median(early),
               "median average regret did not halve");
  for (const double slope : slopes)
    check.expect(slope < 0.95, "slope " + std::to_string(slope));
  return check.ok;
}

// ---------------------------------------------------------------- criterion 7
bool gridworld_desk_scale(Check& check) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    GridWorldSpec spec{8, 8, 0.3, 2, 15000 + seed, true};
    const TabularMdp mdp = make_gridworld(spec);
    const RewardSchedule rewards = make_reward_schedule(spec, 20000, 2000);
    const GibbsConfig cfg{0.2};
    const RunTrace trace = run(mdp, rewards, 20000, cfg, seed);
    check.expect(trace.completed, "run aborted: " + trace.error);
    if (!trace.completed) return false;
    const RegretCurve curve = regret_curve(mdp, trace, rewards, cfg);

    const double at_1000 = curve.rows[999].avg_regret;
    const double at_end = curve.rows[19999].avg_regret;
    check.log << "    seed " << seed << ": avg regret " << at_1000 << " @1000 -> "
              << at_end << " @20000";
    check.expect(at_end < at_1000, "average regret did not fall on seed " +
                                       std::to_string(seed));

    // final segment: t in (18000, 20000]
    const double alg_final =
        curve.rows[19999].cum_reward_alg - curve.rows[17999].cum_reward_alg;
    const double star_final =
        curve.rows[19999].cum_reward_star - curve.rows[17999].cum_reward_star;
    check.log << ", final-segment reward " << alg_final << " vs offline " << star_final
              << "\n";
    check.expect(alg_final >= 0.85 * star_final,
                 "final-segment reward below 85% of offline on seed " +
                     std::to_string(seed));
  }
  return check.ok;
}

// ---------------------------------------------------------------- criterion 8
bool theorem1_arithmetic(Check& check) {
  Rng rng(16000);
  for (int trial = 0; trial < 100; ++trial) {
    const double tau = 0.05 + 4.0 * rng.uniform();
    const double xi = 0.05 + 2.0 * rng.uniform();
    const double c_pi = 0.05 + 2.0 * rng.uniform();
    const double horizon = 10.0 + 1e5 * rng.uniform();
    const TheoryConstants k = TheoryConstants::from_estimates(tau, xi, c_pi);

    const long double a = std::exp(-1.0L / static_cast<long double>(tau));
    const long double ratio = 1.0L + 1.0L / (1.0L - a);
    const long double cv = static_cast<long double>(xi) * c_pi;
    const long double big_c =
        6.0L * tau * (2.0L - cv + 1.0L / cv + (1.0L - cv) / (1.0L + cv));
    const long double t3 = static_cast<long double>(tau) * tau * tau;
    const long double lead =
        ratio * big_c * xi * std::exp(cv * std::log(static_cast<long double>(horizon)));
    const long double log_c = 6.0L * tau * xi * ratio + 2.0L * t3;
    const long double tail =
        log_c + 2.0L * t3 * std::exp(static_cast<long double>(tau) + 2.0L) + 4.0L * tau;
    const long double expected =
        lead + log_c * std::log(static_cast<long double>(horizon)) + tail;

    const double got = theorem1_bound(k, horizon);
    const double rel =
        std::abs(got - static_cast<double>(expected)) / std::abs(static_cast<double>(expected));
    check.expect(rel <= 1e-12, "relative error " + std::to_string(rel));
  }
  check.expect(TheoryConstants::from_estimates(1.0, 1.0, 0.999).sublinear(),
               "flag below c_v = 1");
  check.expect(!TheoryConstants::from_estimates(1.0, 1.0, 1.001).sublinear(),
               "flag above c_v = 1");
  return check.ok;
}

// ---------------------------------------------------------------- criterion 9
bool dobrushin_oracle_equivalence(Check& check) {
  Rng rng(17000);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + rng.below(11);
    const Eigen::MatrixXd p = oracles::random_row_stochastic(rng, n);
    const double fast = dobrushin_coefficient(p).dobrushin;
    const double slow = oracles::dobrushin_loops(p);
    check.expect(std::abs(fast - slow) <= 1e-14,
                 "mismatch " + std::to_string(fast - slow));
  }
  return check.ok;
}

// --------------------------------------------------------------- criterion 10
bool cli_determinism(Check& check) {
  const char* cli = std::getenv("OMDP_CLI");
  check.expect(cli != nullptr, "OMDP_CLI not set");
  if (cli == nullptr) return false;

  const fs::path tmp =
      fs::temp_directory_path() / ("omdp_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(tmp);
  const auto shell = [&](const std::string& args) {
    return WEXITSTATUS(std::system((std::string(cli) + " " + args + " >/dev/null 2>&1").c_str()));
  };
  const auto read_file = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };

  const nlohmann::json config = {
      {"environment",
       {{"type", "random_mdp"}, {"n_states", 6}, {"n_actions", 3},
        {"mix_epsilon", 0.15}, {"seed", 4}}},
      {"algorithm", {{"kappa", 0.4}}},
      {"horizon", 500},
      {"reward_schedule", {{"period", 100}, {"seed", 8}}},
      {"run_seed", 3},
  };
  save_json_file((tmp / "config.json").string(), config);

  check.expect(shell("run --config " + (tmp / "config.json").string() + " --out " +
                     (tmp / "a").string()) == 0,
               "first run failed");
  check.expect(shell("run --config " + (tmp / "config.json").string() + " --out " +
                     (tmp / "b").string()) == 0,
               "second run failed");
  check.expect(read_file(tmp / "a" / "regret.csv") == read_file(tmp / "b" / "regret.csv"),
               "regret.csv differs between identical runs");

  check.expect(shell("validate " + (tmp / "config.json").string()) == 0,
               "validate on a clean config should exit 0");
  nlohmann::json broken = config;
  broken["unknown_key"] = 1;
  save_json_file((tmp / "broken.json").string(), broken);
  check.expect(shell("validate " + (tmp / "broken.json").string()) == 2,
               "validate on a broken config should exit 2");
  check.expect(shell("validate " + (tmp / "missing.json").string()) == 2,
               "validate on a missing file should exit 2");

  fs::remove_all(tmp);
  return check.ok;
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<bool(Check&)> fn;
};

const std::vector<Criterion> kCriteria = {
    {1, "exact evaluation residuals on 100 random ergodic MDPs", 10, exact_evaluation_suite},
    {2, "policy-improvement Lipschitz envelope over 1000 trials", 10, gibbs_lipschitz_suite},
    {3, "running-mean identity along a T=2000 run", 60, running_mean_identity},
    {4, "stochastic iteration reproduces the plain loop", 60, stochastic_iteration_equivalence},
    {5, "TD convergence and approximation error bound", 30, td_convergence_suite},
    {6, "sublinear regret on random online MDPs", 600, sublinear_regret_random},
    {7, "grid world desk-scale regret and reward capture", 540, gridworld_desk_scale},
    {8, "regret-bound arithmetic against an independent evaluation", 10, theorem1_arithmetic},
    {9, "contraction coefficient equals the exhaustive pair scan", 10, dobrushin_oracle_equivalence},
    {10, "CLI determinism and validation exit codes", 120, cli_determinism},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);

  bool all_ok = true;
  for (const auto& criterion : kCriteria) {
    if (only != 0 && criterion.id != only) continue;
    Check check;
    const auto start = std::chrono::steady_clock::now();
    bool ok = false;
    try {
      ok = criterion.fn(check);
    } catch (const std::exception& e) {
      check.log << "    exception: " << e.what() << "\n";
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds > criterion.budget_seconds) {
      ok = false;
      check.log << "    runtime " << seconds << "s exceeded budget "
                << criterion.budget_seconds << "s\n";
    }
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << "criterion " << criterion.id << ": "
              << criterion.name << " (" << seconds << "s)\n"
              << check.log.str();
    all_ok = all_ok && ok;
  }
  return all_ok ? 0 : 1;
}
