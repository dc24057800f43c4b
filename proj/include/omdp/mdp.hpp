#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace omdp {

/// Tolerance used for every probability-simplex check (row sums, entries).
inline constexpr double kSimplexTol = 1e-12;

/// Finite MDP with a known transition kernel, stored per action:
/// kernel(a)(s, s') = p(s' | s, a).
class TabularMdp {
 public:
  TabularMdp(int n_states, int n_actions)
      : n_states_(n_states),
        n_actions_(n_actions),
        kernels_(check_sizes(n_states, n_actions),
                 Eigen::MatrixXd::Zero(n_states, n_states)) {}

  /// Takes one |S|x|S| matrix per action. Only shapes are checked here;
  /// probabilistic invariants are the business of validate_mdp().
  explicit TabularMdp(std::vector<Eigen::MatrixXd> kernels_by_action);

  int n_states() const { return n_states_; }
  int n_actions() const { return n_actions_; }

  const Eigen::MatrixXd& kernel(int action) const { return kernels_[action]; }
  Eigen::MatrixXd& kernel(int action) { return kernels_[action]; }

  double p(int s, int a, int s_next) const { return kernels_[a](s, s_next); }

 private:
  static std::size_t check_sizes(int n_states, int n_actions) {
    if (n_states < 1 || n_actions < 1)
      throw std::invalid_argument("TabularMdp: need at least one state and one action");
    return static_cast<std::size_t>(n_actions);
  }

  int n_states_;
  int n_actions_;
  std::vector<Eigen::MatrixXd> kernels_;
};

struct RowViolation {
  int state;
  int action;
  double row_sum;
  double min_entry;
};

struct ValidationReport {
  std::vector<RowViolation> rows;        // (s, a) rows that are not simplices
  std::vector<std::string> structural;   // shape/size problems
  bool ok() const { return rows.empty() && structural.empty(); }
  std::string to_string() const;
};

/// Checks every (s, a) row for nonnegativity and unit sum (within kSimplexTol).
ValidationReport validate_mdp(const TabularMdp& mdp);

/// Immutable reward table r(s, a) with entries in [0, 1].
class RewardFunction {
 public:
  explicit RewardFunction(Eigen::MatrixXd values);
  static RewardFunction zero(int n_states, int n_actions) {
    return RewardFunction(Eigen::MatrixXd::Zero(n_states, n_actions));
  }
  const Eigen::MatrixXd& values() const { return values_; }
  double operator()(int s, int a) const { return values_(s, a); }
  int n_states() const { return static_cast<int>(values_.rows()); }
  int n_actions() const { return static_cast<int>(values_.cols()); }

 private:
  Eigen::MatrixXd values_;
};

/// Running arithmetic mean of observed reward tables. With no observations
/// the mean is the all-zero table.
class RewardAverager {
 public:
  RewardAverager(int n_states, int n_actions)
      : count_(0), mean_(Eigen::MatrixXd::Zero(n_states, n_actions)) {}

  void add(const RewardFunction& r) {
    if (r.values().rows() != mean_.rows() || r.values().cols() != mean_.cols())
      throw std::invalid_argument("RewardAverager: shape mismatch");
    ++count_;
    mean_ += (r.values() - mean_) / static_cast<double>(count_);
  }

  std::int64_t count() const { return count_; }
  RewardFunction mean() const { return RewardFunction(mean_); }
  const Eigen::MatrixXd& mean_values() const { return mean_; }

 private:
  std::int64_t count_;
  Eigen::MatrixXd mean_;
};

/// Conditional action distribution, one simplex row per state.
class StochasticPolicy {
 public:
  explicit StochasticPolicy(Eigen::MatrixXd probs);
  const Eigen::MatrixXd& probs() const { return probs_; }
  double operator()(int s, int a) const { return probs_(s, a); }
  int n_states() const { return static_cast<int>(probs_.rows()); }
  int n_actions() const { return static_cast<int>(probs_.cols()); }

 private:
  Eigen::MatrixXd probs_;
};

class StateDistribution {
 public:
  explicit StateDistribution(Eigen::VectorXd probs);
  static StateDistribution point_mass(int n_states, int state);
  const Eigen::VectorXd& probs() const { return probs_; }
  double operator()(int s) const { return probs_(s); }
  int n_states() const { return static_cast<int>(probs_.size()); }

 private:
  Eigen::VectorXd probs_;
};

/// The uniform policy pi(a|s) = 1/|A|.
StochasticPolicy uniform_policy(const TabularMdp& mdp);

/// max over states of the per-state L1 difference of the action rows.
double policy_distance(const StochasticPolicy& p1, const StochasticPolicy& p2);

}  // namespace omdp
