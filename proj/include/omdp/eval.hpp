#pragma once

#include <stdexcept>

#include <Eigen/Core>

#include "omdp/mdp.hpp"

namespace omdp {

/// Raised when a chain has no unique stationary distribution (or the
/// evaluation system is numerically singular). Ergodicity under every policy
/// is a standing requirement; it is never silently worked around.
class NonErgodicError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Exact average-reward evaluation of one (mdp, policy, reward) triple.
struct PolicyEvaluation {
  double gain;                  // long-run average reward
  StateDistribution stationary; // unique stationary state distribution
  Eigen::VectorXd value;        // bias vector, centered: stationary . value = 0
  Eigen::MatrixXd q_values;     // q(s,a) = r(s,a) - gain + E[value(s') | s,a]
};

/// One-step contraction data of a row-stochastic matrix.
struct MixingEstimate {
  double dobrushin;  // (1/2) max_{s,s'} || P(s,.) - P(s',.) ||_1, in [0, 1]
  double tau;        // exp(-1/tau) == dobrushin; +inf when dobrushin == 1
  bool mixing;       // dobrushin < 1
};

/// P^pi(s, s') = sum_a pi(a|s) p(s'|s, a).
Eigen::MatrixXd induced_transition(const TabularMdp& mdp, const StochasticPolicy& policy);

/// Stationary distribution of a row-stochastic matrix: direct linear solve
/// with a normalization row, power-iteration fallback if ill-conditioned.
Eigen::VectorXd stationary_of(const Eigen::MatrixXd& transition);

StateDistribution stationary_distribution(const TabularMdp& mdp,
                                          const StochasticPolicy& policy);

double average_reward(const TabularMdp& mdp, const StochasticPolicy& policy,
                      const RewardFunction& reward);

/// Solves the centered average-reward Bellman system
///   (I - P^pi + e d^T) v = R(pi) - e * gain
/// by LU factorization and assembles gain, stationary distribution, value and
/// q-values. Throws NonErgodicError when no unique solution exists.
PolicyEvaluation evaluate_policy(const TabularMdp& mdp, const StochasticPolicy& policy,
                                 const RewardFunction& reward);

MixingEstimate dobrushin_coefficient(const Eigen::MatrixXd& transition);

/// Evaluates the value-sensitivity constant of one policy:
///   (2 - 2 a) / (1 - a) * || (I - P^pi + e d^T)^{-1} Q ||_inf,  a = exp(-1/tau),
/// with the matrix infinity norm (max absolute row sum). Maximizing this over
/// sampled policies yields an empirical Lipschitz estimate for value functions
/// with respect to policy perturbations.
double contraction_constant_cpi(const TabularMdp& mdp, const StochasticPolicy& policy,
                                const RewardFunction& reward, double tau);

}  // namespace omdp
