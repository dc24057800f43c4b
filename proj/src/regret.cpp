#include "omdp/regret.hpp"

#include <cmath>

namespace omdp {

FixedPointResult best_offline_policy(const TabularMdp& mdp, const RewardFunction& mean_reward,
                                     const GibbsConfig& cfg, double tol,
                                     int max_iterations) {
  StochasticPolicy policy = uniform_policy(mdp);
  std::vector<double> history;
  for (int it = 1; it <= max_iterations; ++it) {
    const PolicyEvaluation eval = evaluate_policy(mdp, policy, mean_reward);
    StochasticPolicy next = improve(mdp, mean_reward, eval.value, cfg);
    const double dist = policy_distance(next, policy);
    history.push_back(dist);
    if (dist <= tol) {
      const double gain = average_reward(mdp, next, mean_reward);
      return FixedPointResult{std::move(next), gain, it, std::move(history)};
    }
    policy = std::move(next);
  }
  StochasticPolicy previous = policy;
  const PolicyEvaluation eval = evaluate_policy(mdp, policy, mean_reward);
  StochasticPolicy last = improve(mdp, mean_reward, eval.value, cfg);
  throw FixedPointDivergence(
      "best_offline_policy: no fixed point within " + std::to_string(max_iterations) +
          " iterations (last distance " + std::to_string(history.back()) + ")",
      std::move(last), std::move(previous), history.back());
}

RegretCurve regret_curve(const TabularMdp& mdp, const RunTrace& trace,
                         const RewardSource& rewards, const GibbsConfig& cfg) {
  const std::int64_t horizon = trace.horizon();
  if (horizon < 1) throw std::invalid_argument("regret_curve: empty trace");

  const RewardFunction mean = rewards.mean_over(horizon);
  FixedPointResult best = best_offline_policy(mdp, mean, cfg);
  const Eigen::MatrixXd p_star = induced_transition(mdp, best.policy);

  RegretCurve curve{{}, best.policy, best.gain};
  curve.rows.reserve(static_cast<std::size_t>(horizon));

  Eigen::VectorXd dist_star = trace.initial_dist;
  double cum_alg = 0.0, cum_star = 0.0, cum_gain_star = 0.0;
  for (std::int64_t t = 1; t <= horizon; ++t) {
    const RewardFunction& reward_t = rewards.at(t);
    const auto& record = trace.steps[static_cast<std::size_t>(t - 1)];
    if (record.t != t) throw std::invalid_argument("regret_curve: misaligned trace");

    const Eigen::VectorXd star_reward =
        (best.policy.probs().cwiseProduct(reward_t.values())).rowwise().sum();
    const double exp_star = dist_star.dot(star_reward);
    const double gain_star = average_reward(mdp, best.policy, reward_t);

    cum_alg += record.expected_reward;
    cum_star += exp_star;
    cum_gain_star += gain_star;
    const double cum_regret = cum_star - cum_alg;
    curve.rows.push_back({t, record.expected_reward, record.gain_pi_t, gain_star,
                          cum_alg, cum_star, cum_regret,
                          cum_regret / static_cast<double>(t), cum_gain_star});
    dist_star = p_star.transpose() * dist_star;
  }
  return curve;
}

TheoryConstants TheoryConstants::from_estimates(double tau, double xi, double c_pi) {
  if (!(tau >= 0.0) || !std::isfinite(tau))
    throw std::invalid_argument("TheoryConstants: tau must be finite and nonnegative");
  if (!(xi > 0.0) || !(c_pi > 0.0))
    throw std::invalid_argument("TheoryConstants: xi and c_pi must be positive");
  TheoryConstants k{};
  k.tau = tau;
  k.xi = xi;
  k.c_pi = c_pi;
  k.c_v = xi * c_pi;
  k.c = 6.0 * tau * (2.0 - k.c_v + 1.0 / k.c_v + (1.0 - k.c_v) / (1.0 + k.c_v));
  return k;
}

double theorem1_bound(const TheoryConstants& k, double horizon) {
  if (!std::isfinite(k.tau)) throw std::invalid_argument("theorem1_bound: tau is infinite");
  if (!(horizon >= 1.0)) throw std::invalid_argument("theorem1_bound: horizon must be >= 1");
  const double alpha = k.tau > 0.0 ? std::exp(-1.0 / k.tau) : 0.0;
  const double ratio = (2.0 - alpha) / (1.0 - alpha);
  const double tau3 = k.tau * k.tau * k.tau;
  const double log_term = 6.0 * k.tau * k.xi * ratio + 2.0 * tau3;
  const double constant =
      log_term + 2.0 * tau3 * std::exp(k.tau + 2.0) + 4.0 * k.tau;
  return ratio * k.c * k.xi * std::pow(horizon, k.c_v) +
         log_term * std::log(horizon) + constant;
}

std::vector<Prop4Row> proposition4_gap(const TabularMdp& mdp, const RunTrace& trace,
                                       const RewardSource& rewards, const GibbsConfig& cfg,
                                       const TheoryConstants& constants,
                                       std::int64_t stride) {
  if (trace.values.size() != trace.steps.size())
    throw std::invalid_argument("proposition4_gap: trace was not recorded with values");
  if (stride < 1) throw std::invalid_argument("proposition4_gap: stride must be >= 1");

  std::vector<Prop4Row> rows;
  const RewardFunction& first = rewards.at(1);
  RewardAverager averager(first.n_states(), first.n_actions());
  for (std::int64_t t = 1; t <= trace.horizon(); ++t) {
    averager.add(rewards.at(t));
    if (t % stride != 0 && t != trace.horizon()) continue;
    const double rhs = constants.c * constants.c_v *
                       std::pow(static_cast<double>(t + 1), constants.c_v - 1.0);
    try {
      const FixedPointResult best = best_offline_policy(mdp, averager.mean(), cfg);
      const PolicyEvaluation eval = evaluate_policy(mdp, best.policy, averager.mean());
      const double lhs =
          (eval.value - trace.values[static_cast<std::size_t>(t - 1)])
              .cwiseAbs()
              .maxCoeff();
      rows.push_back({t, lhs, rhs, lhs > rhs, false});
    } catch (const FixedPointDivergence&) {
      rows.push_back({t, 0.0, rhs, false, true});
    }
  }
  return rows;
}

Lemma3Report lemma3_gap(const RunTrace& trace, const TabularMdp& mdp) {
  if (trace.policies.size() != trace.steps.size() ||
      trace.state_dists.size() != trace.steps.size())
    throw std::invalid_argument(
        "lemma3_gap: trace was not recorded with policies and state distributions");
  Lemma3Report report;
  double cum = 0.0;
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const Eigen::VectorXd d_pi =
        stationary_of(induced_transition(mdp, trace.policies[i]));
    const double mismatch = (d_pi - trace.state_dists[i]).cwiseAbs().sum();
    cum += mismatch;
    report.per_step.push_back(mismatch);
    report.cumulative.push_back(cum);
  }
  return report;
}

double lemma3_bound(double tau, double horizon) {
  const double tau3 = tau * tau * tau;
  return 2.0 * tau3 * std::log(horizon) + 2.0 * tau3 +
         2.0 * tau3 * std::exp(tau + 2.0) + 2.0 * tau;
}

std::optional<DeterministicScan> exhaustive_best_deterministic(
    const TabularMdp& mdp, const RewardFunction& reward, std::int64_t max_policies) {
  const int n = mdp.n_states(), m = mdp.n_actions();
  double count = 1.0;
  for (int s = 0; s < n; ++s) {
    count *= m;
    if (count > static_cast<double>(max_policies)) return std::nullopt;
  }

  std::vector<int> actions(n, 0);
  DeterministicScan scan{-1.0, actions};
  while (true) {
    Eigen::MatrixXd probs = Eigen::MatrixXd::Zero(n, m);
    for (int s = 0; s < n; ++s) probs(s, actions[s]) = 1.0;
    try {
      const double gain = average_reward(mdp, StochasticPolicy(probs), reward);
      if (gain > scan.best_gain) {
        scan.best_gain = gain;
        scan.best_actions = actions;
      }
    } catch (const NonErgodicError&) {
      // deterministic policies may break ergodicity; skip those
    }
    int s = 0;
    while (s < n && ++actions[s] == m) actions[s++] = 0;
    if (s == n) break;
  }
  return scan;
}

}  // namespace omdp
