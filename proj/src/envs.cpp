#include "omdp/envs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace omdp {

namespace {

void check_grid(const GridWorldSpec& spec) {
  if (spec.width < 1 || spec.height < 1)
    throw std::invalid_argument("gridworld: dimensions must be positive");
  if (!(spec.slip >= 0.0) || spec.slip >= 1.0)
    throw std::invalid_argument("gridworld: slip must lie in [0, 1)");
  if (spec.super < 1 || spec.width % spec.super != 0 || spec.height % spec.super != 0)
    throw std::invalid_argument("gridworld: super must divide width and height");
}

}  // namespace

TabularMdp make_gridworld(const GridWorldSpec& spec) {
  check_grid(spec);
  const int n = spec.width * spec.height;
  const int goal = n - 1;
  TabularMdp mdp(n, 2);

  // resolved direction -> destination, with infeasible moves aliased;
  // only the goal sits on both borders and it is handled separately below
  auto destination = [&](int s, int dir) {  // dir 0 = east, 1 = north
    const bool at_east = s % spec.width == spec.width - 1;
    const bool at_north = s / spec.width == spec.height - 1;
    if (dir == 0)
      return at_east ? s + spec.width : s + 1;      // east border: go north
    return at_north ? s + 1 : s + spec.width;       // north border: go east
  };

  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < 2; ++a) {
      if (s == goal) {
        mdp.kernel(a)(s, spec.teleport_on_goal ? 0 : s) = 1.0;
        continue;
      }
      mdp.kernel(a)(s, destination(s, a)) += 1.0 - spec.slip;
      mdp.kernel(a)(s, destination(s, 1 - a)) += spec.slip;
    }
  }
  return mdp;
}

RewardSchedule::RewardSchedule(std::vector<std::int64_t> change_points,
                               std::vector<RewardFunction> segments)
    : change_points_(std::move(change_points)), segments_(std::move(segments)) {
  if (change_points_.empty() || change_points_.size() != segments_.size())
    throw std::invalid_argument("RewardSchedule: change points and segments must align");
  if (change_points_.front() != 1)
    throw std::invalid_argument("RewardSchedule: first change point must be 1");
  for (std::size_t i = 1; i < change_points_.size(); ++i)
    if (change_points_[i] <= change_points_[i - 1])
      throw std::invalid_argument("RewardSchedule: change points must strictly increase");
}

const RewardFunction& RewardSchedule::at(std::int64_t t) const {
  if (t < 1) throw std::out_of_range("RewardSchedule: steps are 1-based");
  const auto it =
      std::upper_bound(change_points_.begin(), change_points_.end(), t);
  return segments_[static_cast<std::size_t>(it - change_points_.begin() - 1)];
}

RewardFunction RewardSchedule::mean_over(std::int64_t horizon) const {
  if (horizon < 1) throw std::invalid_argument("mean_over: horizon must be >= 1");
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(segments_.front().n_states(),
                                              segments_.front().n_actions());
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const std::int64_t begin = change_points_[i];
    if (begin > horizon) break;
    const std::int64_t end = i + 1 < change_points_.size()
                                 ? std::min(change_points_[i + 1] - 1, horizon)
                                 : horizon;
    acc += static_cast<double>(end - begin + 1) * segments_[i].values();
  }
  return RewardFunction(acc / static_cast<double>(horizon));
}

namespace {

std::vector<std::int64_t> periodic_change_points(std::int64_t horizon, std::int64_t period) {
  if (horizon < 1 || period < 1)
    throw std::invalid_argument("reward schedule: horizon and period must be >= 1");
  std::vector<std::int64_t> points;
  for (std::int64_t t = 1; t <= horizon; t += period) points.push_back(t);
  return points;
}

}  // namespace

RewardSchedule make_reward_schedule(const GridWorldSpec& spec, std::int64_t horizon,
                                    std::int64_t period) {
  check_grid(spec);
  auto points = periodic_change_points(horizon, period);
  const int n = spec.width * spec.height;
  const int n_super = (spec.width / spec.super) * (spec.height / spec.super);
  Rng rng(spec.seed);

  std::vector<RewardFunction> segments;
  segments.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    Eigen::VectorXd values(n_super);
    for (int g = 0; g < n_super; ++g) values(g) = rng.uniform();
    Eigen::MatrixXd table(n, 2);
    for (int s = 0; s < n; ++s) table.row(s).setConstant(values(supergrid_index(spec, s)));
    segments.emplace_back(std::move(table));
  }
  return RewardSchedule(std::move(points), std::move(segments));
}

RewardSchedule make_iid_reward_schedule(int n_states, int n_actions, std::int64_t horizon,
                                        std::int64_t period, std::uint64_t seed) {
  auto points = periodic_change_points(horizon, period);
  Rng rng(seed);
  std::vector<RewardFunction> segments;
  segments.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    Eigen::MatrixXd table(n_states, n_actions);
    for (int s = 0; s < n_states; ++s)
      for (int a = 0; a < n_actions; ++a) table(s, a) = rng.uniform();
    segments.emplace_back(std::move(table));
  }
  return RewardSchedule(std::move(points), std::move(segments));
}

TabularMdp make_random_mdp(int n_states, int n_actions, double mix_epsilon,
                           std::uint64_t seed) {
  if (n_states < 1 || n_actions < 1)
    throw std::invalid_argument("make_random_mdp: sizes must be positive");
  if (!(mix_epsilon > 0.0) || mix_epsilon > 1.0)
    throw std::invalid_argument("make_random_mdp: mix_epsilon must lie in (0, 1]");
  Rng rng(seed);
  TabularMdp mdp(n_states, n_actions);
  const double floor = mix_epsilon / n_states;
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) {
      Eigen::VectorXd row(n_states);
      for (int j = 0; j < n_states; ++j) row(j) = -std::log(1.0 - rng.uniform());
      const double total = row.sum();
      if (total > 0.0)
        row /= total;
      else
        row.setConstant(1.0 / n_states);
      mdp.kernel(a).row(s) = ((1.0 - mix_epsilon) * row).array() + floor;
    }
  }
  return mdp;
}

int supergrid_index(const GridWorldSpec& spec, int state) {
  const int x = state % spec.width;
  const int y = state / spec.width;
  return (y / spec.super) * (spec.width / spec.super) + x / spec.super;
}

FeatureMap supergrid_features(const GridWorldSpec& spec) {
  check_grid(spec);
  const int n = spec.width * spec.height;
  const int n_super = (spec.width / spec.super) * (spec.height / spec.super);
  if (n_super < 2)
    throw std::invalid_argument("supergrid_features: need at least two super-grids");
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(n, n_super - 1);
  for (int s = 0; s < n; ++s) {
    const int g = supergrid_index(spec, s);
    if (g < n_super - 1) phi(s, g) = 1.0;
  }
  return FeatureMap(std::move(phi));
}

}  // namespace omdp
