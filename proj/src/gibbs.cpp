#include "omdp/gibbs.hpp"

#include <stdexcept>

namespace omdp {

Eigen::MatrixXd action_preferences(const TabularMdp& mdp, const RewardFunction& reward,
                                   const Eigen::VectorXd& value) {
  if (reward.n_states() != mdp.n_states() || reward.n_actions() != mdp.n_actions() ||
      value.size() != mdp.n_states())
    throw std::invalid_argument("action_preferences: shape mismatch");
  Eigen::MatrixXd pref = reward.values();
  for (int a = 0; a < mdp.n_actions(); ++a) pref.col(a) += mdp.kernel(a) * value;
  return pref;
}

StochasticPolicy improve(const TabularMdp& mdp, const RewardFunction& reward,
                         const Eigen::VectorXd& value, const GibbsConfig& cfg) {
  if (!(cfg.kappa > 0.0)) throw std::invalid_argument("improve: kappa must be positive");
  if (!value.allFinite()) throw std::invalid_argument("improve: non-finite value vector");
  Eigen::MatrixXd pref = action_preferences(mdp, reward, value);
  Eigen::MatrixXd probs(pref.rows(), pref.cols());
  for (int s = 0; s < pref.rows(); ++s) {
    const Eigen::RowVectorXd row =
        ((pref.row(s).array() - pref.row(s).maxCoeff()) / cfg.kappa).exp();
    probs.row(s) = row / row.sum();
  }
  return StochasticPolicy(std::move(probs));
}

double assumption1_gap(const TabularMdp& mdp, const RewardFunction& reward,
                       const Eigen::VectorXd& v1, const Eigen::VectorXd& v2,
                       const GibbsConfig& cfg) {
  const StochasticPolicy p1 = improve(mdp, reward, v1, cfg);
  const StochasticPolicy p2 = improve(mdp, reward, v2, cfg);
  const double rhs = cfg.xi() * (v1 - v2).cwiseAbs().maxCoeff();
  double gap = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < mdp.n_states(); ++s) {
    const double lhs = (p1.probs().row(s) - p2.probs().row(s)).cwiseAbs().sum();
    gap = std::max(gap, lhs - rhs);
  }
  return gap;
}

double assumption2_gap(const TabularMdp& mdp, const RewardFunction& r1,
                       const RewardFunction& r2, const Eigen::VectorXd& value,
                       const GibbsConfig& cfg) {
  const StochasticPolicy p1 = improve(mdp, r1, value, cfg);
  const StochasticPolicy p2 = improve(mdp, r2, value, cfg);
  double gap = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < mdp.n_states(); ++s) {
    const double lhs = (p1.probs().row(s) - p2.probs().row(s)).cwiseAbs().sum();
    const double rhs =
        cfg.xi() * (r1.values().row(s) - r2.values().row(s)).cwiseAbs().maxCoeff();
    gap = std::max(gap, lhs - rhs);
  }
  return gap;
}

}  // namespace omdp
