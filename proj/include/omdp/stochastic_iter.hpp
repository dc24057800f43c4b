#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "omdp/online.hpp"

namespace omdp {

/// Pluggable policy-evaluation operator for the generalized value update
///   V_t(s) = (1 - gamma_t(s)) V_{t-1}(s) + gamma_t(s) (H V_{t-1})(s).
/// Exact instantiations return the true value function of (policy, reward);
/// stochastic ones return it plus zero-mean, bounded-second-moment noise.
class EvalOperator {
 public:
  virtual ~EvalOperator() = default;
  virtual Eigen::VectorXd evaluate(const TabularMdp& mdp, const StochasticPolicy& policy,
                                   const RewardFunction& reward,
                                   const Eigen::VectorXd& prev_value) = 0;
  virtual bool exact() const = 0;
};

/// Zero-noise operator backed by the exact evaluator.
class ExactEvaluator final : public EvalOperator {
 public:
  Eigen::VectorXd evaluate(const TabularMdp& mdp, const StochasticPolicy& policy,
                           const RewardFunction& reward,
                           const Eigen::VectorXd& prev_value) override;
  bool exact() const override { return true; }
};

/// Rollout estimate of the centered value function: for every start state,
/// average sum(r - gain) over seeded trajectories. The gain is computed
/// exactly (the kernel is known), so the estimate is unbiased up to the
/// truncation tail of the rollout horizon.
class MonteCarloEvaluator final : public EvalOperator {
 public:
  MonteCarloEvaluator(int rollouts, int horizon, std::uint64_t seed)
      : rollouts_(rollouts), horizon_(horizon), rng_(seed) {}
  Eigen::VectorXd evaluate(const TabularMdp& mdp, const StochasticPolicy& policy,
                           const RewardFunction& reward,
                           const Eigen::VectorXd& prev_value) override;
  bool exact() const override { return false; }

 private:
  int rollouts_;
  int horizon_;
  Rng rng_;
};

/// Step-size rule gamma_t, with its summability properties declared so they
/// can be cross-checked against the rule itself.
struct StepSchedule {
  enum class Kind { OneOverT, Power, Constant };
  Kind kind = Kind::OneOverT;
  double c = 1.0;  // Power: c / t^p, Constant: c
  double p = 1.0;

  bool sum_diverges = true;
  bool sum_sq_converges = true;

  double at(std::int64_t t, int /*state*/ = 0) const;

  static StepSchedule one_over_t();
  static StepSchedule power(double c, double p);
  static StepSchedule constant(double gamma);

  /// True when the declared flags match what the rule satisfies analytically.
  bool flags_consistent() const;
};

struct SiStepOutcome {
  int action;
  Eigen::VectorXd target;  // operator output folded into the value vector
};

/// One generalized step: act under the current policy, evaluate the revealed
/// reward through the operator, then blend the result into the value vector
/// under the schedule. With the exact operator and the 1/t schedule this
/// reproduces the plain online policy-iteration step.
SiStepOutcome si_step(OnlineState& state, const TabularMdp& mdp,
                      const RewardFunction& reward_t, EvalOperator& op,
                      const StepSchedule& schedule, int current_state);

RunTrace si_run(const TabularMdp& mdp, const RewardSource& rewards, std::int64_t horizon,
                const GibbsConfig& cfg, std::uint64_t seed, EvalOperator& op,
                const StepSchedule& schedule, const RunOptions& options = {});

struct ContractionReport {
  double max_ratio = 0.0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;      // pairs with identical values
  std::size_t expansions = 0;   // ratios >= 1
  std::vector<double> ratios;
};

/// Samples value pairs, forms the policies they induce through the Gibbs
/// operator, and measures ||H V - H V'||_inf / ||V - V'||_inf. Purely
/// empirical: the report carries the observed ratios, nothing is asserted.
ContractionReport check_contraction(EvalOperator& op, const TabularMdp& mdp,
                                    const RewardFunction& reward, int trials,
                                    const GibbsConfig& cfg, std::uint64_t seed);

}  // namespace omdp
