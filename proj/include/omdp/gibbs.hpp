#pragma once

#include <cmath>

#include <Eigen/Core>

#include "omdp/mdp.hpp"

namespace omdp {

/// Parameters of the Gibbs (softmax) improvement operator. The exploration
/// parameter kappa is the softmax temperature; xi is the induced Lipschitz
/// constant of the operator (Pinsker bound), 1 / (sqrt(2) * kappa).
struct GibbsConfig {
  double kappa = 1.0;
  double xi() const { return 1.0 / (std::sqrt(2.0) * kappa); }
};

/// pref(s, a) = r(s, a) + E[value(s') | s, a].
Eigen::MatrixXd action_preferences(const TabularMdp& mdp, const RewardFunction& reward,
                                   const Eigen::VectorXd& value);

/// Softmax policy over action preferences at temperature kappa:
///   pi(a|s) proportional to exp(pref(s, a) / kappa).
/// Each row is stabilized by subtracting its maximum preference before
/// exponentiation. Output probabilities are strictly positive.
StochasticPolicy improve(const TabularMdp& mdp, const RewardFunction& reward,
                         const Eigen::VectorXd& value, const GibbsConfig& cfg);

/// max over states of || improve(r, v1)(s,.) - improve(r, v2)(s,.) ||_1
///                    - xi * || v1 - v2 ||_inf.
/// Nonpositive (up to rounding) for the Gibbs operator.
double assumption1_gap(const TabularMdp& mdp, const RewardFunction& reward,
                       const Eigen::VectorXd& v1, const Eigen::VectorXd& v2,
                       const GibbsConfig& cfg);

/// Same gap for two rewards at a fixed value, with the per-state reward
/// sup-norm on the right-hand side.
double assumption2_gap(const TabularMdp& mdp, const RewardFunction& r1,
                       const RewardFunction& r2, const Eigen::VectorXd& value,
                       const GibbsConfig& cfg);

}  // namespace omdp
