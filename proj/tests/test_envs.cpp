#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "omdp/envs.hpp"
#include "oracles.hpp"

using namespace omdp;

TEST_CASE("make_gridworld") {
  SUBCASE("paper-sized grid is a valid MDP") {
    const TabularMdp mdp = make_gridworld(GridWorldSpec{16, 16, 0.3, 4, 0, true});
    CHECK(mdp.n_states() == 256);
    CHECK(mdp.n_actions() == 2);
    CHECK(validate_mdp(mdp).ok());
  }
  SUBCASE("zero slip makes interior rows deterministic") {
    const TabularMdp mdp = make_gridworld(GridWorldSpec{4, 4, 0.0, 2, 0, true});
    for (int s = 0; s < 16; ++s) {
      const int x = s % 4, y = s / 4;
      if (x == 3 || y == 3) continue;  // borders alias, corner teleports
      for (int a = 0; a < 2; ++a) {
        int units = 0;
        for (int j = 0; j < 16; ++j)
          if (mdp.p(s, a, j) == 1.0) ++units;
        CHECK(units == 1);
        CHECK(mdp.kernel(a).row(s).sum() == doctest::Approx(1.0));
      }
    }
  }
  SUBCASE("2x2 grid matches hand-applied rules") {
    const double slip = 0.3;
    const TabularMdp mdp = make_gridworld(GridWorldSpec{2, 2, slip, 1, 0, true});
    // s0 interior-ish: east goes to 1, north to 2, slip swaps them
    CHECK(mdp.p(0, 0, 1) == doctest::Approx(1 - slip));
    CHECK(mdp.p(0, 0, 2) == doctest::Approx(slip));
    CHECK(mdp.p(0, 1, 2) == doctest::Approx(1 - slip));
    CHECK(mdp.p(0, 1, 1) == doctest::Approx(slip));
    // s1 on the east border: both actions resolve north to 3
    CHECK(mdp.p(1, 0, 3) == doctest::Approx(1.0));
    CHECK(mdp.p(1, 1, 3) == doctest::Approx(1.0));
    // s2 on the north border: both actions resolve east to 3
    CHECK(mdp.p(2, 0, 3) == doctest::Approx(1.0));
    CHECK(mdp.p(2, 1, 3) == doctest::Approx(1.0));
    // s3 is the goal: teleports to the start
    CHECK(mdp.p(3, 0, 0) == doctest::Approx(1.0));
    CHECK(mdp.p(3, 1, 0) == doctest::Approx(1.0));
    for (int s = 0; s < 4; ++s)
      for (int a = 0; a < 2; ++a)
        CHECK(mdp.kernel(a).row(s).sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("teleport keeps every state reachable from the start") {
    const TabularMdp mdp = make_gridworld(GridWorldSpec{4, 4, 0.3, 2, 0, true});
    // transitive closure over the support graph (either action)
    const int n = mdp.n_states();
    std::vector<bool> seen(n, false);
    std::vector<int> frontier{0};
    seen[0] = true;
    while (!frontier.empty()) {
      const int s = frontier.back();
      frontier.pop_back();
      for (int a = 0; a < 2; ++a)
        for (int j = 0; j < n; ++j)
          if (mdp.p(s, a, j) > 0 && !seen[j]) {
            seen[j] = true;
            frontier.push_back(j);
          }
    }
    for (int s = 0; s < n; ++s) CHECK(seen[s]);
  }
  SUBCASE("absorbing variant keeps the goal in place") {
    const TabularMdp mdp = make_gridworld(GridWorldSpec{3, 3, 0.3, 1, 0, false});
    CHECK(mdp.p(8, 0, 8) == doctest::Approx(1.0));
    CHECK(mdp.p(8, 1, 8) == doctest::Approx(1.0));
  }
  SUBCASE("invalid specs are rejected") {
    CHECK_THROWS_AS(make_gridworld(GridWorldSpec{4, 4, 1.0, 2, 0, true}),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_gridworld(GridWorldSpec{4, 4, 0.3, 3, 0, true}),
                    std::invalid_argument);
  }
}

TEST_CASE("make_reward_schedule") {
  const GridWorldSpec spec{16, 16, 0.3, 4, 21, true};
  SUBCASE("paper schedule: 20 segments at 1, 5001, ..., 95001") {
    const RewardSchedule schedule = make_reward_schedule(spec, 100000, 5000);
    REQUIRE(schedule.segment_count() == 20);
    for (int i = 0; i < 20; ++i)
      CHECK(schedule.change_points()[i] == 1 + 5000 * static_cast<std::int64_t>(i));
    CHECK(schedule.change_points().back() == 95001);
  }
  SUBCASE("period equal to the horizon is a fixed reward") {
    const RewardSchedule schedule = make_reward_schedule(spec, 1000, 1000);
    CHECK(schedule.segment_count() == 1);
    CHECK(schedule.at(1).values() == schedule.at(1000).values());
  }
  SUBCASE("16 super-grids give 16 distinct values per segment") {
    const RewardSchedule schedule = make_reward_schedule(spec, 10, 10);
    const RewardFunction& r = schedule.at(5);
    std::set<double> distinct;
    for (int s = 0; s < 256; ++s) {
      CHECK(r(s, 0) == r(s, 1));  // shared across actions
      distinct.insert(r(s, 0));
    }
    CHECK(distinct.size() == 16);
    // all states of one super-grid share one draw
    for (int s = 0; s < 256; ++s)
      for (int u = 0; u < 256; ++u)
        if (supergrid_index(spec, s) == supergrid_index(spec, u))
          CHECK(r(s, 0) == r(u, 0));
  }
  SUBCASE("equal seeds reproduce identical sequences") {
    const RewardSchedule a = make_reward_schedule(spec, 2000, 100);
    const RewardSchedule b = make_reward_schedule(spec, 2000, 100);
    for (std::int64_t t = 1; t <= 2000; t += 37) CHECK(a.at(t).values() == b.at(t).values());
  }
  SUBCASE("segment boundaries are inclusive on the left") {
    const RewardSchedule schedule = make_reward_schedule(spec, 250, 100);
    CHECK(schedule.at(100).values() == schedule.at(1).values());
    CHECK(schedule.at(101).values() != schedule.at(100).values());
  }
  SUBCASE("mean_over matches the step-by-step average") {
    const GridWorldSpec small{4, 4, 0.3, 2, 5, true};
    const RewardSchedule schedule = make_reward_schedule(small, 250, 100);
    RewardAverager acc(16, 2);
    for (std::int64_t t = 1; t <= 250; ++t) acc.add(schedule.at(t));
    CHECK((schedule.mean_over(250).values() - acc.mean_values()).cwiseAbs().maxCoeff() <=
          1e-12);
  }
}

TEST_CASE("make_iid_reward_schedule draws independent entries") {
  const RewardSchedule schedule = make_iid_reward_schedule(5, 3, 300, 100, 9);
  CHECK(schedule.segment_count() == 3);
  const RewardFunction& r = schedule.at(1);
  std::set<double> distinct;
  for (int s = 0; s < 5; ++s)
    for (int a = 0; a < 3; ++a) distinct.insert(r(s, a));
  CHECK(distinct.size() == 15);
}

TEST_CASE("make_random_mdp") {
  SUBCASE("full blending gives uniform rows") {
    const TabularMdp mdp = make_random_mdp(6, 2, 1.0, 3);
    for (int a = 0; a < 2; ++a)
      CHECK((mdp.kernel(a).array() - 1.0 / 6).abs().maxCoeff() <= 1e-15);
    CHECK(dobrushin_coefficient(induced_transition(mdp, uniform_policy(mdp))).dobrushin ==
          0.0);
  }
  SUBCASE("entries respect the mixing floor") {
    const TabularMdp mdp = make_random_mdp(8, 3, 0.1, 4);
    for (int a = 0; a < 3; ++a) CHECK(mdp.kernel(a).minCoeff() >= 0.1 / 8 - 1e-15);
    CHECK(validate_mdp(mdp).ok());
  }
  SUBCASE("equal seeds are bit-identical") {
    const TabularMdp a = make_random_mdp(7, 2, 0.2, 11);
    const TabularMdp b = make_random_mdp(7, 2, 0.2, 11);
    for (int k = 0; k < 2; ++k) CHECK(a.kernel(k) == b.kernel(k));
  }
}

TEST_CASE("supergrid_features satisfy the feature invariants") {
  const GridWorldSpec spec{8, 8, 0.3, 2, 0, true};
  const FeatureMap features = supergrid_features(spec);
  CHECK(features.n_states() == 64);
  CHECK(features.dim() == 15);  // 16 super-grids minus the dropped one
}
