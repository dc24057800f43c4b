#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "omdp/stochastic_iter.hpp"

namespace omdp {

/// Linear state features, one row per state. Two structural requirements make
/// the average-reward fixed-point system well posed, and both are enforced at
/// construction: the columns must be independent, and the all-ones vector must
/// not lie in their span (average-reward values are only determined up to
/// constants, so a representable constant would make the system singular).
class FeatureMap {
 public:
  explicit FeatureMap(Eigen::MatrixXd phi);
  const Eigen::MatrixXd& matrix() const { return phi_; }
  int n_states() const { return static_cast<int>(phi_.rows()); }
  int dim() const { return static_cast<int>(phi_.cols()); }

 private:
  Eigen::MatrixXd phi_;
};

/// Indicator features for all states but the last (K = |S| - 1).
FeatureMap tabular_minus_one(int n_states);

/// alpha_i = scale / (offset + i^exponent). Divergent sum, convergent square
/// sum for exponent in (0.5, 1].
struct AlphaSchedule {
  double scale = 1.0;
  double offset = 100.0;
  double exponent = 0.8;
  double at(std::int64_t i) const;
};

struct TransitionSample {
  int state;
  int action;
  double reward;
  int next_state;
};

struct TdState {
  Eigen::VectorXd theta;
  double rho_hat = 0.0;   // running average-reward estimate
  std::int64_t i = 0;     // inner iteration counter
  AlphaSchedule alpha;
};

TdState init_td(const FeatureMap& features, const AlphaSchedule& alpha = {});

/// One temporal-difference update from an observed transition:
///   delta = r - rho_hat + theta.phi(s') - theta.phi(s)
///   theta += alpha * delta * phi(s),  rho_hat <- (1 - alpha) rho_hat + alpha r.
void td_step(TdState& state, const FeatureMap& features, const TransitionSample& sample);

struct ProjectedFixedPoint {
  Eigen::VectorXd theta;
  double residual;  // D-weighted norm of the projected-equation residual
};

/// Solves the stationary-distribution-weighted projected fixed-point system
///   Phi^T D (I - P^pi) Phi theta = Phi^T D (R(pi) - e * gain).
ProjectedFixedPoint projected_fixed_point(const TabularMdp& mdp,
                                          const StochasticPolicy& policy,
                                          const RewardFunction& reward,
                                          const FeatureMap& features);

struct ErrorBoundReport {
  double lhs;           // D-norm error of the centered fixed-point approximation
  double best_approx;   // infimum of the D-norm error over all parameters
  double factor;        // 1 / sqrt(1 - exp(-2/tau))
  double rhs;           // factor * best_approx
  bool holds;
};

/// Compares the fixed-point approximation error against the best achievable
/// one inflated by the mixing factor. `tau` must be finite (mixing chain).
ErrorBoundReport error_bound_check(const TabularMdp& mdp, const StochasticPolicy& policy,
                                   const RewardFunction& reward, const FeatureMap& features,
                                   double tau);

/// sqrt(sum_s d(s) x(s)^2).
double d_weighted_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& d);

/// Evaluation operator backed by the sampled TD loop: simulates transitions
/// under the policy, runs `iterations` updates (optionally stopping early once
/// the parameter movement stays below `settle_tol`), and returns the centered
/// feature-space value estimate.
class TdEvaluator final : public EvalOperator {
 public:
  TdEvaluator(FeatureMap features, std::int64_t iterations, std::uint64_t seed,
              AlphaSchedule alpha = {}, double settle_tol = 0.0)
      : features_(std::move(features)),
        iterations_(iterations),
        alpha_(alpha),
        settle_tol_(settle_tol),
        rng_(seed) {}

  Eigen::VectorXd evaluate(const TabularMdp& mdp, const StochasticPolicy& policy,
                           const RewardFunction& reward,
                           const Eigen::VectorXd& prev_value) override;
  bool exact() const override { return false; }

 private:
  FeatureMap features_;
  std::int64_t iterations_;
  AlphaSchedule alpha_;
  double settle_tol_;
  Rng rng_;
};

}  // namespace omdp
