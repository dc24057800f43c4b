#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "omdp/eval.hpp"
#include "omdp/gibbs.hpp"
#include "omdp/mdp.hpp"
#include "omdp/rng.hpp"

namespace omdp {

/// Adversary interface: one reward table per step, revealed after acting.
/// Steps are 1-based.
class RewardSource {
 public:
  virtual ~RewardSource() = default;
  virtual const RewardFunction& at(std::int64_t t) const = 0;
  /// Arithmetic mean of the first `horizon` tables.
  virtual RewardFunction mean_over(std::int64_t horizon) const;
};

/// Explicit per-step table list (arbitrary adversaries, mostly for tests).
class RewardSequence final : public RewardSource {
 public:
  explicit RewardSequence(std::vector<RewardFunction> steps) : steps_(std::move(steps)) {}
  const RewardFunction& at(std::int64_t t) const override;
  std::int64_t size() const { return static_cast<std::int64_t>(steps_.size()); }

 private:
  std::vector<RewardFunction> steps_;
};

/// State of the online policy-iteration loop after t completed steps.
/// `policy` always holds the policy for the *next* step, i.e. the improvement
/// of the current reward average and value estimate.
struct OnlineState {
  std::int64_t t;
  Eigen::VectorXd value;     // V_t, running average of exact per-step values
  RewardAverager averager;   // mean of revealed rewards r_1..r_t
  StochasticPolicy policy;   // improve(averager.mean(), value)
  GibbsConfig cfg;
  std::uint64_t seed;
  Rng rng;
};

/// Fresh state: V_0 = 0, no observed rewards, uniform Gibbs policy.
OnlineState init(const TabularMdp& mdp, const GibbsConfig& cfg, std::uint64_t seed);

struct StepOutcome {
  int action;
  PolicyEvaluation eval;  // exact evaluation of (policy used, revealed reward)
};

/// One online step: sample an action from the current policy, reveal the
/// reward, fold its exact value function into the running average with step
/// size 1/t, and prepare the improved policy for the next step.
StepOutcome step(OnlineState& state, const TabularMdp& mdp,
                 const RewardFunction& reward_t, int current_state);

struct StepRecord {
  std::int64_t t;
  int state;                // sampled state the step acted from
  int action;               // sampled action
  double realized_reward;   // reward_t(state, action)
  double expected_reward;   // E[reward_t] under the propagated distribution
  double gain_pi_t;         // average reward of the step's policy under reward_t
};

struct RunOptions {
  Eigen::VectorXd initial_dist;  // empty: point mass on state 0
  bool record_policies = false;
  bool record_state_dists = false;
  bool record_values = false;
};

struct RunTrace {
  std::vector<StepRecord> steps;
  Eigen::VectorXd initial_dist;
  std::vector<StochasticPolicy> policies;    // pi_t, when recorded
  std::vector<Eigen::VectorXd> state_dists;  // distribution of s_t, when recorded
  std::vector<Eigen::VectorXd> values;       // V_t after the step-t update, when recorded
  std::optional<StochasticPolicy> final_policy;  // improvement after the last step
  bool completed = true;
  std::string error;
  std::int64_t horizon() const { return static_cast<std::int64_t>(steps.size()); }
};

/// Runs the loop for `horizon` steps. Alongside the sampled trajectory the
/// exact state distribution is propagated, which makes the expected-reward
/// column (and hence regret accounting) deterministic. A failing step aborts
/// with the partial trace preserved and the error recorded.
RunTrace run(const TabularMdp& mdp, const RewardSource& rewards, std::int64_t horizon,
             const GibbsConfig& cfg, std::uint64_t seed, const RunOptions& options = {});

}  // namespace omdp
