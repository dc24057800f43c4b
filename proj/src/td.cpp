#include "omdp/td.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "omdp/eval.hpp"

namespace omdp {

namespace {
constexpr double kOnesResidualTol = 1e-8;
constexpr double kFixedPointResidualTol = 1e-8;
}  // namespace

FeatureMap::FeatureMap(Eigen::MatrixXd phi) : phi_(std::move(phi)) {
  if (phi_.rows() < 1 || phi_.cols() < 1)
    throw std::invalid_argument("FeatureMap: empty matrix");
  if (!phi_.allFinite()) throw std::invalid_argument("FeatureMap: non-finite entries");
  if (phi_.cols() > phi_.rows())
    throw std::invalid_argument("FeatureMap: more features than states");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(phi_);
  if (qr.rank() < phi_.cols())
    throw std::invalid_argument("FeatureMap: columns are not linearly independent");
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(phi_.rows());
  const double residual = (phi_ * qr.solve(ones) - ones).norm();
  if (residual <= kOnesResidualTol)
    throw std::invalid_argument(
        "FeatureMap: the all-ones vector lies in the feature span");
}

FeatureMap tabular_minus_one(int n_states) {
  if (n_states < 2) throw std::invalid_argument("tabular_minus_one: need >= 2 states");
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(n_states, n_states - 1);
  phi.topLeftCorner(n_states - 1, n_states - 1).setIdentity();
  return FeatureMap(std::move(phi));
}

double AlphaSchedule::at(std::int64_t i) const {
  return scale / (offset + std::pow(static_cast<double>(i), exponent));
}

TdState init_td(const FeatureMap& features, const AlphaSchedule& alpha) {
  return TdState{Eigen::VectorXd::Zero(features.dim()), 0.0, 0, alpha};
}

void td_step(TdState& state, const FeatureMap& features, const TransitionSample& sample) {
  const auto& phi = features.matrix();
  const double alpha = state.alpha.at(state.i);
  const double delta = sample.reward - state.rho_hat +
                       state.theta.dot(phi.row(sample.next_state)) -
                       state.theta.dot(phi.row(sample.state));
  if (!std::isfinite(delta)) throw std::runtime_error("td_step: non-finite TD error");
  state.theta += alpha * delta * phi.row(sample.state).transpose();
  state.rho_hat = (1.0 - alpha) * state.rho_hat + alpha * sample.reward;
  state.i += 1;
}

ProjectedFixedPoint projected_fixed_point(const TabularMdp& mdp,
                                          const StochasticPolicy& policy,
                                          const RewardFunction& reward,
                                          const FeatureMap& features) {
  if (features.n_states() != mdp.n_states())
    throw std::invalid_argument("projected_fixed_point: feature rows != states");
  const PolicyEvaluation eval = evaluate_policy(mdp, policy, reward);
  const Eigen::MatrixXd p = induced_transition(mdp, policy);
  const Eigen::VectorXd& d = eval.stationary.probs();
  const auto& phi = features.matrix();

  const Eigen::MatrixXd weighted = d.asDiagonal() * phi;  // D Phi
  const Eigen::MatrixXd lhs = phi.transpose() * (weighted - d.asDiagonal() * (p * phi));
  const Eigen::VectorXd r_pi =
      (policy.probs().cwiseProduct(reward.values())).rowwise().sum();
  const Eigen::VectorXd rhs = weighted.transpose() * (r_pi.array() - eval.gain).matrix();

  Eigen::FullPivLU<Eigen::MatrixXd> lu(lhs);
  if (!lu.isInvertible())
    throw std::invalid_argument(
        "projected_fixed_point: singular system (feature invariants violated?)");
  Eigen::VectorXd theta = lu.solve(rhs);

  // residual of the projected equation, measured in the D-weighted norm
  const Eigen::VectorXd bellman =
      (r_pi.array() - eval.gain).matrix() + p * (phi * theta);
  Eigen::LDLT<Eigen::MatrixXd> gram(phi.transpose() * weighted);
  const Eigen::VectorXd projected = phi * gram.solve(weighted.transpose() * bellman);
  const double residual = d_weighted_norm(projected - phi * theta, d);
  if (!(residual <= kFixedPointResidualTol))
    throw std::runtime_error("projected_fixed_point: residual " +
                             std::to_string(residual));
  return ProjectedFixedPoint{std::move(theta), residual};
}

ErrorBoundReport error_bound_check(const TabularMdp& mdp, const StochasticPolicy& policy,
                                   const RewardFunction& reward, const FeatureMap& features,
                                   double tau) {
  if (!std::isfinite(tau))
    throw NonErgodicError("error_bound_check: non-mixing chain (tau infinite)");
  const PolicyEvaluation eval = evaluate_policy(mdp, policy, reward);
  const Eigen::VectorXd& d = eval.stationary.probs();
  const auto& phi = features.matrix();

  // centering operator (I - e d^T) applied to the feature columns
  const Eigen::MatrixXd centered =
      phi - Eigen::VectorXd::Ones(phi.rows()) * (d.transpose() * phi);

  const ProjectedFixedPoint fp = projected_fixed_point(mdp, policy, reward, features);
  const double lhs = d_weighted_norm(centered * fp.theta - eval.value, d);

  // infimum over parameters: D-weighted least squares onto the centered span
  const Eigen::MatrixXd gram = centered.transpose() * d.asDiagonal() * centered;
  const Eigen::VectorXd proj_rhs = centered.transpose() * d.asDiagonal() * eval.value;
  const Eigen::VectorXd theta_best = Eigen::LDLT<Eigen::MatrixXd>(gram).solve(proj_rhs);
  const double best = d_weighted_norm(centered * theta_best - eval.value, d);

  const double alpha2 = tau > 0.0 ? std::exp(-2.0 / tau) : 0.0;
  const double factor = 1.0 / std::sqrt(1.0 - alpha2);
  const double rhs = factor * best;
  return ErrorBoundReport{lhs, best, factor, rhs, lhs <= rhs + 1e-12};
}

double d_weighted_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& d) {
  return std::sqrt(x.cwiseProduct(x).dot(d));
}

Eigen::VectorXd TdEvaluator::evaluate(const TabularMdp& mdp,
                                      const StochasticPolicy& policy,
                                      const RewardFunction& reward,
                                      const Eigen::VectorXd& /*prev_value*/) {
  TdState state = init_td(features_, alpha_);
  int s = rng_.below(mdp.n_states());
  for (std::int64_t i = 0; i < iterations_; ++i) {
    const int a = rng_.categorical(policy.probs().row(s));
    const int next = rng_.categorical(mdp.kernel(a).row(s));
    const Eigen::VectorXd before = state.theta;
    td_step(state, features_, {s, a, reward(s, a), next});
    s = next;
    if (settle_tol_ > 0.0 && i > iterations_ / 10 &&
        (state.theta - before).cwiseAbs().maxCoeff() < settle_tol_)
      break;
  }
  // center the feature-space estimate with the exact stationary distribution
  const Eigen::VectorXd d = stationary_of(induced_transition(mdp, policy));
  Eigen::VectorXd v = features_.matrix() * state.theta;
  v.array() -= d.dot(v);
  return v;
}

}  // namespace omdp
