#include "omdp/eval.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace omdp {

namespace {

constexpr double kStationaryResidualTol = 1e-10;
constexpr double kBellmanResidualTol = 1e-8;
constexpr double kPowerIterTol = 1e-12;
constexpr long kPowerIterCap = 1'000'000;

double stationary_residual(const Eigen::MatrixXd& p, const Eigen::VectorXd& d) {
  return (p.transpose() * d - d).cwiseAbs().sum();
}

// Left eigenvector iteration d <- P^T d with L1 normalization. Converges for
// aperiodic unichains; the cap turns everything else into an explicit error.
Eigen::VectorXd power_iteration(const Eigen::MatrixXd& p) {
  const Eigen::Index n = p.rows();
  Eigen::VectorXd d = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  for (long it = 0; it < kPowerIterCap; ++it) {
    Eigen::VectorXd next = p.transpose() * d;
    next /= next.sum();
    const double change = (next - d).cwiseAbs().sum();
    d.swap(next);
    if (change <= kPowerIterTol) return d;
  }
  throw NonErgodicError("stationary distribution: power iteration did not converge");
}

Eigen::VectorXd cleanup_distribution(Eigen::VectorXd d) {
  if (!d.allFinite() || d.minCoeff() < -1e-9) {
    throw NonErgodicError("stationary distribution: solve produced an invalid vector");
  }
  d = d.cwiseMax(0.0);
  d /= d.sum();
  return d;
}

}  // namespace

Eigen::MatrixXd induced_transition(const TabularMdp& mdp, const StochasticPolicy& policy) {
  if (policy.n_states() != mdp.n_states() || policy.n_actions() != mdp.n_actions())
    throw std::invalid_argument("induced_transition: shape mismatch");
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(mdp.n_states(), mdp.n_states());
  for (int a = 0; a < mdp.n_actions(); ++a)
    p += policy.probs().col(a).asDiagonal() * mdp.kernel(a);
  return p;
}

Eigen::VectorXd stationary_of(const Eigen::MatrixXd& p) {
  const Eigen::Index n = p.rows();
  if (n != p.cols()) throw std::invalid_argument("stationary_of: matrix not square");
  if (n == 1) return Eigen::VectorXd::Ones(1);

  // (P^T - I) d = 0 with the last (redundant) equation replaced by sum(d) = 1.
  Eigen::MatrixXd a = p.transpose() - Eigen::MatrixXd::Identity(n, n);
  a.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  Eigen::VectorXd d = lu.solve(b);
  if (d.allFinite() && d.minCoeff() > -1e-9) {
    d = cleanup_distribution(std::move(d));
    if (stationary_residual(p, d) <= kStationaryResidualTol) return d;
  }

  // The fast path failed: decide between genuine non-ergodicity (the replaced
  // system is singular exactly when the stationary distribution is not unique)
  // and plain ill-conditioning, which power iteration can still handle.
  Eigen::FullPivLU<Eigen::MatrixXd> full(a);
  if (!full.isInvertible())
    throw NonErgodicError("stationary distribution: multiple recurrent classes");
  d = full.solve(b);
  if (d.allFinite() && d.minCoeff() > -1e-9) {
    d = cleanup_distribution(std::move(d));
    if (stationary_residual(p, d) <= kStationaryResidualTol) return d;
  }
  d = power_iteration(p);
  if (stationary_residual(p, d) > kStationaryResidualTol)
    throw NonErgodicError("stationary distribution: residual did not converge");
  return d;
}

StateDistribution stationary_distribution(const TabularMdp& mdp,
                                          const StochasticPolicy& policy) {
  return StateDistribution(stationary_of(induced_transition(mdp, policy)));
}

namespace {

Eigen::VectorXd policy_reward_vector(const StochasticPolicy& policy,
                                     const RewardFunction& reward) {
  return (policy.probs().cwiseProduct(reward.values())).rowwise().sum();
}

}  // namespace

double average_reward(const TabularMdp& mdp, const StochasticPolicy& policy,
                      const RewardFunction& reward) {
  const Eigen::VectorXd d = stationary_of(induced_transition(mdp, policy));
  return d.dot(policy_reward_vector(policy, reward));
}

PolicyEvaluation evaluate_policy(const TabularMdp& mdp, const StochasticPolicy& policy,
                                 const RewardFunction& reward) {
  if (reward.n_states() != mdp.n_states() || reward.n_actions() != mdp.n_actions())
    throw std::invalid_argument("evaluate_policy: reward shape mismatch");
  const Eigen::Index n = mdp.n_states();
  const Eigen::MatrixXd p = induced_transition(mdp, policy);
  const Eigen::VectorXd d = stationary_of(p);
  const Eigen::VectorXd r_pi = policy_reward_vector(policy, reward);
  const double gain = d.dot(r_pi);

  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) - p;
  system.rowwise() += d.transpose();
  const Eigen::VectorXd rhs = r_pi.array() - gain;

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
  Eigen::VectorXd v = lu.solve(rhs);
  auto bellman_residual = [&](const Eigen::VectorXd& x) {
    return (x - (rhs + p * x)).cwiseAbs().maxCoeff();
  };
  if (!v.allFinite() || bellman_residual(v) > kBellmanResidualTol) {
    Eigen::FullPivLU<Eigen::MatrixXd> full(system);
    if (!full.isInvertible())
      throw NonErgodicError("evaluate_policy: singular value system");
    v = full.solve(rhs);
    if (!v.allFinite() || bellman_residual(v) > kBellmanResidualTol)
      throw NonErgodicError("evaluate_policy: value solve did not converge");
  }
  // Exact centering. The Bellman residual is invariant under constant shifts,
  // so this only removes the (tiny) numerical drift of d.v.
  v.array() -= d.dot(v);

  Eigen::MatrixXd q(n, mdp.n_actions());
  for (int a = 0; a < mdp.n_actions(); ++a)
    q.col(a) = reward.values().col(a).array() - gain + (mdp.kernel(a) * v).array();

  return PolicyEvaluation{gain, StateDistribution(d), std::move(v), std::move(q)};
}

MixingEstimate dobrushin_coefficient(const Eigen::MatrixXd& p) {
  const Eigen::Index n = p.rows();
  double worst = 0.0;
  for (Eigen::Index s = 0; s < n; ++s)
    for (Eigen::Index u = s + 1; u < n; ++u)
      worst = std::max(worst, 0.5 * (p.row(s) - p.row(u)).cwiseAbs().sum());
  worst = std::min(worst, 1.0);

  MixingEstimate est;
  est.dobrushin = worst;
  est.mixing = worst < 1.0;
  if (worst <= 0.0)
    est.tau = 0.0;  // one-step mixing
  else if (worst < 1.0)
    est.tau = -1.0 / std::log(worst);
  else
    est.tau = std::numeric_limits<double>::infinity();
  return est;
}

double contraction_constant_cpi(const TabularMdp& mdp, const StochasticPolicy& policy,
                                const RewardFunction& reward, double tau) {
  if (!std::isfinite(tau)) throw std::invalid_argument("contraction_constant_cpi: tau must be finite");
  const double alpha = tau > 0.0 ? std::exp(-1.0 / tau) : 0.0;
  const double prefactor = (2.0 - 2.0 * alpha) / (1.0 - alpha);

  const PolicyEvaluation eval = evaluate_policy(mdp, policy, reward);
  const Eigen::Index n = mdp.n_states();
  Eigen::MatrixXd system =
      Eigen::MatrixXd::Identity(n, n) - induced_transition(mdp, policy);
  system.rowwise() += eval.stationary.probs().transpose();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
  const Eigen::MatrixXd x = lu.solve(eval.q_values);
  if (!x.allFinite())
    throw NonErgodicError("contraction_constant_cpi: singular system");
  return prefactor * x.cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace omdp
