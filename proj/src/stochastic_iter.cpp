#include "omdp/stochastic_iter.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>

namespace omdp {

Eigen::VectorXd ExactEvaluator::evaluate(const TabularMdp& mdp,
                                         const StochasticPolicy& policy,
                                         const RewardFunction& reward,
                                         const Eigen::VectorXd& /*prev_value*/) {
  return evaluate_policy(mdp, policy, reward).value;
}

Eigen::VectorXd MonteCarloEvaluator::evaluate(const TabularMdp& mdp,
                                              const StochasticPolicy& policy,
                                              const RewardFunction& reward,
                                              const Eigen::VectorXd& /*prev_value*/) {
  const double gain = average_reward(mdp, policy, reward);
  Eigen::VectorXd estimate = Eigen::VectorXd::Zero(mdp.n_states());
  for (int start = 0; start < mdp.n_states(); ++start) {
    double acc = 0.0;
    for (int k = 0; k < rollouts_; ++k) {
      int s = start;
      for (int i = 0; i < horizon_; ++i) {
        const int a = rng_.categorical(policy.probs().row(s));
        acc += reward(s, a) - gain;
        s = rng_.categorical(mdp.kernel(a).row(s));
      }
    }
    estimate(start) = acc / static_cast<double>(rollouts_);
  }
  return estimate;
}

double StepSchedule::at(std::int64_t t, int /*state*/) const {
  switch (kind) {
    case Kind::OneOverT:
      return 1.0 / static_cast<double>(t);
    case Kind::Power:
      return c / std::pow(static_cast<double>(t), p);
    case Kind::Constant:
      return c;
  }
  return 0.0;
}

StepSchedule StepSchedule::one_over_t() { return StepSchedule{Kind::OneOverT, 1.0, 1.0, true, true}; }

StepSchedule StepSchedule::power(double c, double p) {
  if (!(c > 0.0) || !(p > 0.5) || p > 1.0)
    throw std::invalid_argument("StepSchedule::power: need c > 0 and p in (0.5, 1]");
  return StepSchedule{Kind::Power, c, p, true, true};
}

StepSchedule StepSchedule::constant(double gamma) {
  if (!(gamma > 0.0) || gamma > 1.0)
    throw std::invalid_argument("StepSchedule::constant: need gamma in (0, 1]");
  // sum of gamma^2 diverges: this schedule is for exact-operator experiments
  return StepSchedule{Kind::Constant, gamma, 0.0, true, false};
}

bool StepSchedule::flags_consistent() const {
  switch (kind) {
    case Kind::OneOverT:
      return sum_diverges && sum_sq_converges;
    case Kind::Power:
      // c / t^p with p in (0.5, 1]: harmonic-type divergence, square summable
      return sum_diverges == true && sum_sq_converges == (p > 0.5);
    case Kind::Constant:
      return sum_diverges && !sum_sq_converges;
  }
  return false;
}

SiStepOutcome si_step(OnlineState& state, const TabularMdp& mdp,
                      const RewardFunction& reward_t, EvalOperator& op,
                      const StepSchedule& schedule, int current_state) {
  if (current_state < 0 || current_state >= mdp.n_states())
    throw std::invalid_argument("si_step: state index out of range");
  const int action = state.rng.categorical(state.policy.probs().row(current_state));

  Eigen::VectorXd target = op.evaluate(mdp, state.policy, reward_t, state.value);

  state.t += 1;
  if (schedule.kind == StepSchedule::Kind::OneOverT) {
    const double gamma = 1.0 / static_cast<double>(state.t);
    state.value = (1.0 - gamma) * state.value + gamma * target;
  } else {
    for (int s = 0; s < mdp.n_states(); ++s) {
      const double gamma = schedule.at(state.t, s);
      state.value(s) = (1.0 - gamma) * state.value(s) + gamma * target(s);
    }
  }
  state.averager.add(reward_t);
  state.policy = improve(mdp, state.averager.mean(), state.value, state.cfg);
  return SiStepOutcome{action, std::move(target)};
}

RunTrace si_run(const TabularMdp& mdp, const RewardSource& rewards, std::int64_t horizon,
                const GibbsConfig& cfg, std::uint64_t seed, EvalOperator& op,
                const StepSchedule& schedule, const RunOptions& options) {
  if (horizon < 1) throw std::invalid_argument("si_run: horizon must be >= 1");

  RunTrace trace;
  trace.initial_dist = options.initial_dist.size() > 0
                           ? options.initial_dist
                           : StateDistribution::point_mass(mdp.n_states(), 0).probs();
  if (trace.initial_dist.size() != mdp.n_states())
    throw std::invalid_argument("si_run: initial distribution has wrong length");
  trace.steps.reserve(static_cast<std::size_t>(horizon));

  OnlineState state = init(mdp, cfg, seed);
  Eigen::VectorXd dist = trace.initial_dist;
  int current = state.rng.categorical(dist);

  for (std::int64_t t = 1; t <= horizon; ++t) {
    const RewardFunction& reward_t = rewards.at(t);
    const StochasticPolicy policy_t = state.policy;
    const double expected =
        dist.dot((policy_t.probs().cwiseProduct(reward_t.values())).rowwise().sum());

    std::optional<SiStepOutcome> outcome;
    double gain_t = 0.0;
    try {
      outcome = si_step(state, mdp, reward_t, op, schedule, current);
      gain_t = average_reward(mdp, policy_t, reward_t);
    } catch (const NonErgodicError& e) {
      trace.completed = false;
      trace.error = e.what();
      return trace;
    }

    trace.steps.push_back({t, current, outcome->action,
                           reward_t(current, outcome->action), expected, gain_t});
    if (options.record_policies) trace.policies.push_back(policy_t);
    if (options.record_state_dists) trace.state_dists.push_back(dist);
    if (options.record_values) trace.values.push_back(state.value);

    current = state.rng.categorical(mdp.kernel(outcome->action).row(current));
    dist = induced_transition(mdp, policy_t).transpose() * dist;
  }
  trace.final_policy = state.policy;
  return trace;
}

ContractionReport check_contraction(EvalOperator& op, const TabularMdp& mdp,
                                    const RewardFunction& reward, int trials,
                                    const GibbsConfig& cfg, std::uint64_t seed) {
  if (!op.exact())
    throw std::invalid_argument("check_contraction: requires an exact operator");
  ContractionReport report;
  Rng rng(seed);
  for (int k = 0; k < trials; ++k) {
    Eigen::VectorXd v1(mdp.n_states()), v2(mdp.n_states());
    for (int s = 0; s < mdp.n_states(); ++s) {
      v1(s) = rng.normal();
      v2(s) = rng.normal();
    }
    const double denom = (v1 - v2).cwiseAbs().maxCoeff();
    if (denom == 0.0) {
      ++report.skipped;
      continue;
    }
    const StochasticPolicy p1 = improve(mdp, reward, v1, cfg);
    const StochasticPolicy p2 = improve(mdp, reward, v2, cfg);
    const Eigen::VectorXd h1 = op.evaluate(mdp, p1, reward, v1);
    const Eigen::VectorXd h2 = op.evaluate(mdp, p2, reward, v2);
    const double ratio = (h1 - h2).cwiseAbs().maxCoeff() / denom;
    report.ratios.push_back(ratio);
    report.max_ratio = std::max(report.max_ratio, ratio);
    if (ratio >= 1.0) ++report.expansions;
    ++report.evaluated;
  }
  return report;
}

}  // namespace omdp
