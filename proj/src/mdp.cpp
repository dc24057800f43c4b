#include "omdp/mdp.hpp"

#include <cmath>
#include <sstream>

namespace omdp {

TabularMdp::TabularMdp(std::vector<Eigen::MatrixXd> kernels_by_action)
    : kernels_(std::move(kernels_by_action)) {
  if (kernels_.empty()) throw std::invalid_argument("TabularMdp: no actions");
  n_actions_ = static_cast<int>(kernels_.size());
  n_states_ = static_cast<int>(kernels_[0].rows());
  if (n_states_ < 1) throw std::invalid_argument("TabularMdp: no states");
  for (const auto& k : kernels_) {
    if (k.rows() != n_states_ || k.cols() != n_states_)
      throw std::invalid_argument("TabularMdp: kernel must be |S|x|S| for every action");
  }
}

ValidationReport validate_mdp(const TabularMdp& mdp) {
  ValidationReport report;
  for (int s = 0; s < mdp.n_states(); ++s) {
    for (int a = 0; a < mdp.n_actions(); ++a) {
      const auto row = mdp.kernel(a).row(s);
      const double sum = row.sum();
      const double min_entry = row.minCoeff();
      if (std::abs(sum - 1.0) > kSimplexTol || min_entry < -kSimplexTol ||
          !row.allFinite()) {
        report.rows.push_back({s, a, sum, min_entry});
      }
    }
  }
  return report;
}

std::string ValidationReport::to_string() const {
  if (ok()) return "valid";
  std::ostringstream out;
  for (const auto& msg : structural) out << msg << "\n";
  for (const auto& v : rows) {
    out << "row (state=" << v.state << ", action=" << v.action
        << "): sum=" << v.row_sum << ", min=" << v.min_entry << "\n";
  }
  return out.str();
}

RewardFunction::RewardFunction(Eigen::MatrixXd values) : values_(std::move(values)) {
  if (values_.rows() < 1 || values_.cols() < 1)
    throw std::invalid_argument("RewardFunction: empty table");
  if (!values_.allFinite() || values_.minCoeff() < -kSimplexTol ||
      values_.maxCoeff() > 1.0 + kSimplexTol)
    throw std::invalid_argument("RewardFunction: entries must lie in [0, 1]");
}

StochasticPolicy::StochasticPolicy(Eigen::MatrixXd probs) : probs_(std::move(probs)) {
  if (probs_.rows() < 1 || probs_.cols() < 1)
    throw std::invalid_argument("StochasticPolicy: empty table");
  if (!probs_.allFinite() || probs_.minCoeff() < -kSimplexTol)
    throw std::invalid_argument("StochasticPolicy: negative probability");
  for (int s = 0; s < probs_.rows(); ++s) {
    if (std::abs(probs_.row(s).sum() - 1.0) > kSimplexTol)
      throw std::invalid_argument("StochasticPolicy: row " + std::to_string(s) +
                                  " does not sum to 1");
  }
}

StateDistribution::StateDistribution(Eigen::VectorXd probs) : probs_(std::move(probs)) {
  if (probs_.size() < 1) throw std::invalid_argument("StateDistribution: empty");
  if (!probs_.allFinite() || probs_.minCoeff() < -kSimplexTol ||
      std::abs(probs_.sum() - 1.0) > kSimplexTol)
    throw std::invalid_argument("StateDistribution: not a probability vector");
}

StateDistribution StateDistribution::point_mass(int n_states, int state) {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(n_states);
  d(state) = 1.0;
  return StateDistribution(std::move(d));
}

StochasticPolicy uniform_policy(const TabularMdp& mdp) {
  return StochasticPolicy(Eigen::MatrixXd::Constant(
      mdp.n_states(), mdp.n_actions(), 1.0 / mdp.n_actions()));
}

double policy_distance(const StochasticPolicy& p1, const StochasticPolicy& p2) {
  if (p1.n_states() != p2.n_states() || p1.n_actions() != p2.n_actions())
    throw std::invalid_argument("policy_distance: shape mismatch");
  return (p1.probs() - p2.probs()).cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace omdp
