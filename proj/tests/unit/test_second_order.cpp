#include <gtest/gtest.h>

#include <algorithm>

#include "build.hpp"
#include "netlisna/errors.hpp"
#include "netlisna/second_order.hpp"
#include "netlisna/sim.hpp"
#include "oracles.hpp"

using namespace netlisna;
using testkit::e;
using testkit::v;

namespace {

// Two unit-length disjoint edges 1-2 and 3-4 joined by a middle edge 2-3.
SpatialNetwork chain4() {
  return testkit::net({{1, 0, 0}, {2, 1, 0}, {3, 2, 0}, {4, 3, 0}}, {{1, 1, 2}, {2, 2, 3}, {3, 3, 4}});
}

}  // namespace

TEST(Resolve, EdgeSpec) {
  auto n = oracle::mixed_fixture();
  auto r = resolve(n, "edge 5");
  EXPECT_EQ(r.edges, (std::vector<EdgeId>{e(5)}));
  EXPECT_DOUBLE_EQ(r.total_length, 1.0);
  EXPECT_EQ(resolve(n, "edge 9 in v5").edges, (std::vector<EdgeId>{e(9)}));
  EXPECT_THROW(resolve(n, "edge 9 out v5"), ContractError);
}

TEST(Resolve, NeighborhoodOfStar) {
  auto n = testkit::net({{1, 0, 0}, {2, 1, 0}, {3, 0, 1}, {4, -1, 0}}, {{1, 2, 1}, {2, 2, 3}, {3, 2, 4}});
  EXPECT_EQ(resolve(n, "nach(v2)").edges, (std::vector<EdgeId>{e(1), e(2), e(3)}));
}

TEST(Resolve, AncestorsMatchGraphCore) {
  auto n = oracle::mixed_fixture();
  const std::vector<VertexId> seq{v(1), v(5), v(6), v(9)};
  const auto path = make_path(n, seq);
  auto sorted = [](std::vector<EdgeId> es) {
    std::sort(es.begin(), es.end());
    return es;
  };
  EXPECT_EQ(resolve(n, "anch(dpath 1,5,6,9)").edges, sorted(ancestors_edge_set(n, path)));
  EXPECT_EQ(resolve(n, "dech(dpath 1,5,6,9)").edges, sorted(descendants_edge_set(n, path)));
}

TEST(Resolve, SetUnionsAndPaths) {
  auto n = oracle::mixed_fixture();
  EXPECT_EQ(resolve(n, "pa+ch(v5)").edges, resolve(n, "fam(v5)").edges);
  EXPECT_EQ(resolve(n, "path v1..v3").edges, (std::vector<EdgeId>{e(1), e(2)}));
  EXPECT_EQ(resolve(n, "dpath 1..6").edges, (std::vector<EdgeId>{e(4), e(13)}));
}

TEST(Resolve, Errors) {
  auto n = oracle::mixed_fixture();
  EXPECT_THROW(resolve(n, "pa(v1)"), UndefinedValueError);
  EXPECT_THROW(resolve(n, "edge 99"), LookupError);
  EXPECT_THROW(resolve(n, "nach(v42)"), LookupError);
  EXPECT_THROW(resolve(n, "zz(v1)"), ContractError);
  EXPECT_THROW(resolve(n, "anch(dpath 1,5)"), UndefinedValueError);
  EXPECT_THROW(resolve(n, "dpath 9,6"), ContractError);
}

TEST(SecondOrder, SingleReplicateIsDegenerate) {
  auto n = chain4();
  auto p = testkit::counts(n, {2, 0, 3});
  auto res = second_order(p, edge_entity(n, e(1)), edge_entity(n, e(3)));
  EXPECT_DOUBLE_EQ(res.lambda2, 6.0);
  EXPECT_EQ(res.gamma, 0.0);
  EXPECT_TRUE(res.degenerate);
  EXPECT_EQ(res.n_replicates, 1u);
}

TEST(SecondOrder, TwoReplicateHandExample) {
  auto n = chain4();
  auto p = testkit::replicated(n, {{1, 0, 2}, {3, 0, 6}});
  auto res = second_order(p, edge_entity(n, e(1)), edge_entity(n, e(3)));
  EXPECT_DOUBLE_EQ(res.gamma, 2.0);
  EXPECT_DOUBLE_EQ(res.lambda2, (1.0 * 2.0 + 3.0 * 6.0) / 2.0);
  EXPECT_FALSE(res.degenerate);
}

TEST(SecondOrder, OverlapIsRejected) {
  auto n = oracle::mixed_fixture();
  auto p = SnappedPattern::empty(n);
  EXPECT_THROW(second_order(p, resolve(n, "fam(v5)"), resolve(n, "edge 9")), ContractError);
}

TEST(SecondOrder, SymmetricAndMatchesCovarianceOracle) {
  auto n = oracle::mixed_fixture();
  SimSpec spec{DoublyStochastic{2.0, 0.6}, 25, 9};
  auto sim = simulate(n, spec);
  const std::vector<std::pair<std::string, std::string>> pairs = {
      {"edge 1", "edge 5"}, {"nach(v8)", "pa(v5)"}, {"dpath 1,5,6", "path 7,8"}, {"anch(dpath 2,5,8)", "ch(v6)"}};
  for (const auto& [sa, sb] : pairs) {
    auto a = resolve(n, sa);
    auto b = resolve(n, sb);
    auto ab = second_order(sim.pattern, a, b);
    auto ba = second_order(sim.pattern, b, a);
    EXPECT_DOUBLE_EQ(ab.lambda2, ba.lambda2);
    EXPECT_DOUBLE_EQ(ab.gamma, ba.gamma);
    std::vector<double> xa;
    std::vector<double> xb;
    for (const auto& [na, nb] : ab.per_replicate) {
      xa.push_back(na);
      xb.push_back(nb);
    }
    EXPECT_NEAR(ab.gamma, oracle::covariance(xa, xb), 1e-9);
  }
}

TEST(SecondOrder, ShiftLeavesGammaUnchanged) {
  // Adding a constant number of events to every replicate of a shifts N(a)/l(a)
  // by a constant.
  auto n = chain4();
  auto p = testkit::replicated(n, {{1, 0, 2}, {3, 0, 6}, {0, 0, 1}});
  auto q = testkit::replicated(n, {{6, 0, 2}, {8, 0, 6}, {5, 0, 1}});
  auto a = edge_entity(n, e(1));
  auto b = edge_entity(n, e(3));
  EXPECT_NEAR(second_order(p, a, b).gamma, second_order(q, a, b).gamma, 1e-12);
  EXPECT_NE(second_order(p, a, b).lambda2, second_order(q, a, b).lambda2);
}

TEST(LagSecondOrder, TwoEdgesAtLagOne) {
  // Edges sharing a vertex sit at lag 0; the outer edges of the chain sit at lag 1.
  auto n2 = chain4();
  auto p2 = testkit::counts(n2, {2, 0, 3});
  auto res = lag_second_order(p2, 1);
  EXPECT_EQ(res.pair_count, 2u);
  EXPECT_DOUBLE_EQ(res.lambda2, 6.0);
}

TEST(LagSecondOrder, NoPairsIsUndefined) {
  auto n = chain4();
  EXPECT_THROW(lag_second_order(testkit::counts(n, {1, 1, 1}), 5), UndefinedValueError);
}

TEST(LagSecondOrder, ClusteredAdjacentEdgesGivePositiveGamma) {
  // Pairs of edges at lag 1 share high counts; the rest are empty.
  auto n = testkit::net({{1, 0, 0}, {2, 1, 0}, {3, 2, 0}, {4, 3, 0}, {5, 4, 0}, {6, 5, 0}, {7, 6, 0}},
                        {{1, 1, 2}, {2, 2, 3}, {3, 3, 4}, {4, 4, 5}, {5, 5, 6}, {6, 6, 7}});
  auto p = testkit::counts(n, {8, 0, 8, 0, 0, 0});
  EXPECT_GT(lag_second_order(p, 1).gamma, 0.0);
}

TEST(EdgeLags, MinimumEndpointHopDistance) {
  auto n = chain4();
  auto lags = edge_lags(n, Traversal::undirected);
  EXPECT_EQ(lags[0][1], 0);
  EXPECT_EQ(lags[0][2], 1);
}

TEST(Configurations, EveryRowEvaluatesOnMixedFixture) {
  auto n = oracle::mixed_fixture();
  auto sim = simulate(n, SimSpec{HomogeneousPoisson{2.0}, 8, 1});
  const auto configs = oracle::table_configurations(n);
  EXPECT_GE(configs.size(), 24u);
  for (const auto& c : configs) {
    ASSERT_FALSE(c.a.empty()) << c.table << " row " << c.row << ": " << c.description;
    EXPECT_NO_THROW(second_order(sim.pattern, resolve(n, c.a), resolve(n, c.b)))
        << c.table << " row " << c.row << ": " << c.a << " / " << c.b;
  }
}
