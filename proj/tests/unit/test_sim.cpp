#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "build.hpp"
#include "netlisna/errors.hpp"
#include "netlisna/second_order.hpp"
#include "netlisna/sim.hpp"
#include "oracles.hpp"

using namespace netlisna;
using testkit::e;

TEST(Simulate, ZeroRateGivesEmptyPattern) {
  auto n = oracle::mixed_fixture();
  auto sim = simulate(n, {HomogeneousPoisson{0.0}, 3, 1});
  EXPECT_TRUE(sim.events.empty());
  EXPECT_EQ(sim.pattern.total(), 0);
  EXPECT_EQ(sim.pattern.replicates(), (std::vector<Replicate>{0, 1, 2}));
}

TEST(Simulate, MeanCountMatchesRateTimesLength) {
  auto n = testkit::net({{1, 0, 0}, {2, 3, 0}}, {{1, 1, 2}});
  auto sim = simulate(n, {HomogeneousPoisson{2.0}, 400, 77});
  std::vector<double> c;
  for (auto r : sim.pattern.replicates()) c.push_back(static_cast<double>(count_edge(sim.pattern, e(1), r)));
  const auto ms = oracle::mean_se(c);
  EXPECT_LT(std::abs(ms.mean - 6.0), 3.0 * ms.se);
}

TEST(Simulate, EventsLieOnTheirEdgeAndMatchCounts) {
  auto n = oracle::mixed_fixture();
  auto sim = simulate(n, {HomogeneousPoisson{3.0}, 4, 5});
  EXPECT_EQ(static_cast<std::int64_t>(sim.events.size()), sim.pattern.total());
  auto re = snap(n, sim.events);
  for (auto r : sim.pattern.replicates()) {
    for (const auto& ed : n.edges()) EXPECT_EQ(count_edge(re, ed.id, r), count_edge(sim.pattern, ed.id, r));
  }
  for (const auto& row : re.snap_report()) EXPECT_LT(row.distance, 1e-9);
}

TEST(Simulate, ReproducibleForEqualSeeds) {
  auto n = oracle::mixed_fixture();
  SimSpec spec{DoublyStochastic{1.5, 0.4}, 6, 123};
  auto a = simulate(n, spec);
  auto b = simulate(n, spec);
  ASSERT_EQ(a.events.size(), b.events.size());
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    EXPECT_EQ(a.events[i].x, b.events[i].x);
    EXPECT_EQ(a.events[i].y, b.events[i].y);
    EXPECT_EQ(a.events[i].replicate, b.events[i].replicate);
  }
  spec.seed = 124;
  auto c = simulate(n, spec);
  ASSERT_FALSE(a.events.empty());
  EXPECT_TRUE(c.events.size() != a.events.size() || c.events.front().x != a.events.front().x);
}

TEST(Simulate, InhomogeneousRatesDriveExpectedTotal) {
  auto n = oracle::mixed_fixture();
  InhomogeneousPoisson model;
  model.rates[e(1)] = 4.0;
  model.rates[e(11)] = 2.0;
  auto sim = simulate(n, {model, 300, 8});
  std::vector<double> totals;
  for (auto r : sim.pattern.replicates()) totals.push_back(static_cast<double>(sim.pattern.total(r)));
  const auto ms = oracle::mean_se(totals);
  EXPECT_LT(std::abs(ms.mean - (4.0 * 1.0 + 2.0 * 1.25)), 3.0 * ms.se);
  for (auto r : sim.pattern.replicates()) EXPECT_EQ(count_edge(sim.pattern, e(5), r), 0);
}

TEST(Simulate, SharedFactorInducesPositiveCovariance) {
  auto n = testkit::net({{1, 0, 0}, {2, 1, 0}, {3, 2, 0}, {4, 3, 0}}, {{1, 1, 2}, {2, 2, 3}, {3, 3, 4}});
  auto sim = simulate(n, {DoublyStochastic{5.0, 0.8}, 400, 2});
  auto res = second_order(sim.pattern, edge_entity(n, e(1)), edge_entity(n, e(3)));
  EXPECT_GT(res.gamma, 0.0);
}

TEST(Simulate, Errors) {
  auto n = oracle::mixed_fixture();
  EXPECT_THROW(simulate(n, {HomogeneousPoisson{-1.0}, 1, 0}), ContractError);
  EXPECT_THROW(simulate(n, {HomogeneousPoisson{1.0}, 0, 0}), ContractError);
  InhomogeneousPoisson bad;
  bad.rates[e(99)] = 1.0;
  EXPECT_THROW(simulate(n, {bad, 1, 0}), ContractError);
  EXPECT_THROW(simulate(n, {DoublyStochastic{1.0, -0.1}, 1, 0}), ContractError);
}
