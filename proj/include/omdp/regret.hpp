#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "omdp/online.hpp"

namespace omdp {

/// Fixed point of the policy-improvement map on a fixed reward, reached by
/// iteration. `history` keeps the distance between successive iterates.
struct FixedPointResult {
  StochasticPolicy policy;
  double gain;  // average reward of the fixed point under the given reward
  int iterations;
  std::vector<double> history;
};

/// Carries the last two iterates when the fixed-point iteration fails to
/// settle within the iteration cap.
class FixedPointDivergence : public std::runtime_error {
 public:
  FixedPointDivergence(std::string msg, StochasticPolicy last, StochasticPolicy previous,
                       double distance)
      : std::runtime_error(std::move(msg)),
        last(std::move(last)),
        previous(std::move(previous)),
        distance(distance) {}
  StochasticPolicy last;
  StochasticPolicy previous;
  double distance;
};

/// Best time-independent policy of the improvement class on a fixed reward:
/// iterate policy -> improve(reward, value(policy)) until successive iterates
/// are within `tol` in policy distance.
FixedPointResult best_offline_policy(const TabularMdp& mdp, const RewardFunction& mean_reward,
                                     const GibbsConfig& cfg, double tol = 1e-10,
                                     int max_iterations = 10'000);

struct RegretRow {
  std::int64_t t;
  double exp_reward_alg;   // E[r_t] under the algorithm's propagated distribution
  double gain_pi_t;        // average reward of pi_t under r_t
  double gain_star;        // average reward of the offline policy under r_t
  double cum_reward_alg;
  double cum_reward_star;  // exact expected return of the offline policy
  double cum_regret;       // cum_reward_star - cum_reward_alg
  double avg_regret;       // cum_regret / t
  double cum_gain_star;    // running sum of gain_star
};

struct RegretCurve {
  std::vector<RegretRow> rows;
  StochasticPolicy best_policy;
  double best_gain_on_mean;  // average reward of best_policy on the mean reward
};

/// Exact regret accounting of a finished run against the best offline policy
/// computed on the mean of the revealed reward sequence. The offline side is
/// propagated from the same initial distribution the run used.
RegretCurve regret_curve(const TabularMdp& mdp, const RunTrace& trace,
                         const RewardSource& rewards, const GibbsConfig& cfg);

/// Constants of the regret bound. Estimated empirically for an instance:
/// tau from sampled-policy contraction coefficients, c_pi from the value
/// sensitivity formula maximized over sampled policies.
struct TheoryConstants {
  double tau;
  double xi;
  double c_pi;
  double c_v;  // xi * c_pi
  double c;    // 6 tau (2 - c_v + 1/c_v + (1 - c_v)/(1 + c_v))
  bool sublinear() const { return c_v < 1.0; }
  static TheoryConstants from_estimates(double tau, double xi, double c_pi);
};

/// Evaluates the regret-bound right-hand side at horizon T.
double theorem1_bound(const TheoryConstants& constants, double horizon);

struct Prop4Row {
  std::int64_t t;
  double lhs;  // || value of the per-step best policy on the reward average - V_t ||_inf
  double rhs;  // c * c_v * (t + 1)^(c_v - 1)
  bool violated;
  bool skipped;  // fixed-point iteration failed at this step
};

/// Value-tracking diagnostic along a run: how far the running value average
/// lags behind the value of the best policy on the current reward average.
/// Reported, never asserted; the constants are empirical estimates.
/// Requires a trace recorded with values; evaluates every `stride`-th step.
std::vector<Prop4Row> proposition4_gap(const TabularMdp& mdp, const RunTrace& trace,
                                       const RewardSource& rewards, const GibbsConfig& cfg,
                                       const TheoryConstants& constants,
                                       std::int64_t stride = 1);

struct Lemma3Report {
  std::vector<double> per_step;    // || d_{pi_t} - d_{alg,t} ||_1
  std::vector<double> cumulative;  // running sum of per_step
};

/// Stationary-vs-actual distribution mismatch along a run. Requires a trace
/// recorded with policies and state distributions.
Lemma3Report lemma3_gap(const RunTrace& trace, const TabularMdp& mdp);

/// Reference envelope for the cumulative mismatch:
///   2 tau^3 ln T + 2 tau^3 + 2 tau^3 e^(tau + 2) + 2 tau.
double lemma3_bound(double tau, double horizon);

struct DeterministicScan {
  double best_gain;
  std::vector<int> best_actions;  // one action per state
};

/// Exhaustive sweep over all deterministic policies (cross-check for small
/// instances). Empty when |A|^|S| exceeds `max_policies`.
std::optional<DeterministicScan> exhaustive_best_deterministic(
    const TabularMdp& mdp, const RewardFunction& reward, std::int64_t max_policies = 4096);

}  // namespace omdp
