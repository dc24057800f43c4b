#pragma once

#include <cstdint>
#include <vector>

#include "omdp/online.hpp"
#include "omdp/td.hpp"

namespace omdp {

/// Grid with two actions (east, north) and a slip probability of moving in
/// the other direction. States index row-major from the south-west corner:
/// s = y * width + x. Rewards are drawn per super-grid (edge length `super`,
/// which must divide both dimensions) using `seed`.
struct GridWorldSpec {
  int width = 16;
  int height = 16;
  double slip = 0.3;
  int super = 4;
  std::uint64_t seed = 0;
  bool teleport_on_goal = true;
};

/// Builds the grid dynamics. Moves that would leave the grid are aliased to
/// the feasible direction (after slip resolution); at the north-east corner
/// every move teleports back to the south-west corner when teleport_on_goal
/// is set (keeping the chain irreducible), otherwise the corner absorbs.
TabularMdp make_gridworld(const GridWorldSpec& spec);

/// Piecewise-constant reward sequence: the table changes at fixed change
/// points and is constant in between. Implements the adversary interface.
class RewardSchedule final : public RewardSource {
 public:
  RewardSchedule(std::vector<std::int64_t> change_points,
                 std::vector<RewardFunction> segments);
  const RewardFunction& at(std::int64_t t) const override;
  RewardFunction mean_over(std::int64_t horizon) const override;
  const std::vector<std::int64_t>& change_points() const { return change_points_; }
  std::size_t segment_count() const { return segments_.size(); }
  const RewardFunction& segment(std::size_t i) const { return segments_[i]; }

 private:
  std::vector<std::int64_t> change_points_;  // strictly increasing, starts at 1
  std::vector<RewardFunction> segments_;
};

/// Schedule for the grid world: change points 1, period+1, 2*period+1, ...;
/// within each segment all states of one super-grid share a single
/// uniform-[0,1) draw, identical across actions.
RewardSchedule make_reward_schedule(const GridWorldSpec& spec, std::int64_t horizon,
                                    std::int64_t period);

/// Generic schedule with independent uniform-[0,1) entries per (s, a).
RewardSchedule make_iid_reward_schedule(int n_states, int n_actions, std::int64_t horizon,
                                        std::int64_t period, std::uint64_t seed);

/// Dirichlet rows blended with the uniform distribution:
/// p <- (1 - eps) p + eps / |S|. Every entry is at least eps / |S|, so the
/// chain mixes under every policy.
TabularMdp make_random_mdp(int n_states, int n_actions, double mix_epsilon,
                           std::uint64_t seed);

/// Index of the super-grid containing a state.
int supergrid_index(const GridWorldSpec& spec, int state);

/// Super-grid indicator features, dropping the last super-grid so the
/// all-ones vector stays out of the span.
FeatureMap supergrid_features(const GridWorldSpec& spec);

}  // namespace omdp
