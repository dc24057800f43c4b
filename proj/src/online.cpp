#include "omdp/online.hpp"

#include <optional>

namespace omdp {

RewardFunction RewardSource::mean_over(std::int64_t horizon) const {
  if (horizon < 1) throw std::invalid_argument("mean_over: horizon must be >= 1");
  const RewardFunction& first = at(1);
  RewardAverager acc(first.n_states(), first.n_actions());
  for (std::int64_t t = 1; t <= horizon; ++t) acc.add(at(t));
  return acc.mean();
}

const RewardFunction& RewardSequence::at(std::int64_t t) const {
  if (t < 1 || t > size())
    throw std::out_of_range("RewardSequence: step out of range");
  return steps_[static_cast<std::size_t>(t - 1)];
}

OnlineState init(const TabularMdp& mdp, const GibbsConfig& cfg, std::uint64_t seed) {
  if (!(cfg.kappa > 0.0)) throw std::invalid_argument("init: kappa must be positive");
  Eigen::VectorXd v0 = Eigen::VectorXd::Zero(mdp.n_states());
  RewardAverager averager(mdp.n_states(), mdp.n_actions());
  StochasticPolicy policy = improve(mdp, averager.mean(), v0, cfg);
  return OnlineState{0, std::move(v0), std::move(averager), std::move(policy),
                     cfg, seed, Rng(seed)};
}

StepOutcome step(OnlineState& state, const TabularMdp& mdp,
                 const RewardFunction& reward_t, int current_state) {
  if (current_state < 0 || current_state >= mdp.n_states())
    throw std::invalid_argument("step: state index out of range");
  const int action = state.rng.categorical(state.policy.probs().row(current_state));

  PolicyEvaluation eval = [&] {
    try {
      return evaluate_policy(mdp, state.policy, reward_t);
    } catch (const NonErgodicError& e) {
      throw NonErgodicError(std::string("step ") + std::to_string(state.t + 1) +
                            ": " + e.what());
    }
  }();

  state.t += 1;
  const double gamma = 1.0 / static_cast<double>(state.t);
  state.value = (1.0 - gamma) * state.value + gamma * eval.value;
  state.averager.add(reward_t);
  state.policy = improve(mdp, state.averager.mean(), state.value, state.cfg);
  return StepOutcome{action, std::move(eval)};
}

RunTrace run(const TabularMdp& mdp, const RewardSource& rewards, std::int64_t horizon,
             const GibbsConfig& cfg, std::uint64_t seed, const RunOptions& options) {
  if (horizon < 1) throw std::invalid_argument("run: horizon must be >= 1");

  RunTrace trace;
  trace.initial_dist = options.initial_dist.size() > 0
                           ? options.initial_dist
                           : StateDistribution::point_mass(mdp.n_states(), 0).probs();
  if (trace.initial_dist.size() != mdp.n_states())
    throw std::invalid_argument("run: initial distribution has wrong length");
  trace.steps.reserve(static_cast<std::size_t>(horizon));

  OnlineState state = init(mdp, cfg, seed);
  Eigen::VectorXd dist = trace.initial_dist;  // distribution of s_t
  int current = state.rng.categorical(dist);

  for (std::int64_t t = 1; t <= horizon; ++t) {
    const RewardFunction& reward_t = rewards.at(t);
    const StochasticPolicy policy_t = state.policy;
    const double expected =
        dist.dot((policy_t.probs().cwiseProduct(reward_t.values())).rowwise().sum());

    std::optional<StepOutcome> outcome;
    try {
      outcome = step(state, mdp, reward_t, current);
    } catch (const NonErgodicError& e) {
      trace.completed = false;
      trace.error = e.what();
      return trace;
    }

    trace.steps.push_back({t, current, outcome->action,
                           reward_t(current, outcome->action), expected,
                           outcome->eval.gain});
    if (options.record_policies) trace.policies.push_back(policy_t);
    if (options.record_state_dists) trace.state_dists.push_back(dist);
    if (options.record_values) trace.values.push_back(state.value);

    // advance the sampled path and the exact distribution under pi_t
    current = state.rng.categorical(mdp.kernel(outcome->action).row(current));
    dist = induced_transition(mdp, policy_t).transpose() * dist;
  }
  trace.final_policy = state.policy;
  return trace;
}

}  // namespace omdp
