#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "build.hpp"
#include "netlisna/autocorr.hpp"
#include "netlisna/errors.hpp"
#include "netlisna/weights.hpp"
#include "oracles.hpp"

using namespace netlisna;
using testkit::v;

namespace {

SpatialNetwork cycle4() {
  return testkit::net({{1, 0, 0}, {2, 1, 0}, {3, 1, 1}, {4, 0, 1}}, {{1, 1, 2}, {2, 2, 3}, {3, 3, 4}, {4, 4, 1}});
}

SpatialNetwork path5() {
  return testkit::net({{1, 0, 0}, {2, 1, 0}, {3, 2, 0}, {4, 3, 0}, {5, 4, 0}},
                      {{1, 1, 2}, {2, 2, 3}, {3, 3, 4}, {4, 4, 5}});
}

std::vector<VertexId> ids(const SpatialNetwork& n) {
  std::vector<VertexId> out;
  for (const auto& vx : n.vertices()) out.push_back(vx.id);
  return out;
}

NodeField field_on(const SpatialNetwork& n, std::vector<double> x) { return NodeField(ids(n), std::move(x)); }

// Connected random network, its binary first-order weights and a random field.
struct Case {
  SpatialNetwork net;
  WeightMatrix w;
  NodeField f;
};

Case random_case(std::mt19937_64& rng, int n, bool nonnegative = false) {
  auto net = oracle::random_connected_network(rng, n, n / 2, 0.0);
  auto w = adjacency(net, 1);
  std::normal_distribution<double> z(5.0, 2.0);
  std::vector<double> x(static_cast<std::size_t>(n));
  for (auto& xi : x) xi = nonnegative ? std::abs(z(rng)) : z(rng);
  return {net, w, NodeField(ids(net), std::move(x))};
}

}  // namespace

TEST(Checkerboard, GlobalStatistics) {
  auto n = cycle4();
  auto f = field_on(n, {1, 0, 1, 0});
  auto w = adjacency(n, 1);
  EXPECT_NEAR(moran_i(f, w), -1.0, 1e-12);
  EXPECT_NEAR(geary_c(f, w), 1.5, 1e-12);
  EXPECT_NEAR(autocorrelation(f, w), -1.0, 1e-12);
}

TEST(Checkerboard, LocalStatistics) {
  auto n = cycle4();
  auto f = field_on(n, {1, 0, 1, 0});
  auto w = adjacency(n, 1);
  for (double li : local_moran(f, w).values) EXPECT_NEAR(li, -1.5, 1e-12);
  for (double ci : local_geary(f, w)) EXPECT_NEAR(ci, 8.0, 1e-12);
  for (auto q : local_moran(f, w).quadrants) EXPECT_TRUE(q == Quadrant::high_low || q == Quadrant::low_high);
}

TEST(LaggedAutocovariance, AlternatingField) {
  auto n = cycle4();
  auto w = adjacency(n, 1);
  EXPECT_NEAR(lagged_autocovariance(field_on(n, {1, -1, 1, -1}), w), -1.0, 1e-12);
  EXPECT_NEAR(lagged_autocovariance(field_on(n, {1, -1, 1, -1}), w, false), -1.0, 1e-12);
}

TEST(Statistics, ConstantFieldIsUndefined) {
  auto n = cycle4();
  auto f = field_on(n, {2, 2, 2, 2});
  auto w = adjacency(n, 1);
  EXPECT_THROW(moran_i(f, w), UndefinedValueError);
  EXPECT_THROW(geary_c(f, w), UndefinedValueError);
  EXPECT_THROW(autocorrelation(f, w), UndefinedValueError);
  EXPECT_EQ(lagged_autocovariance(f, w), 0.0);
}

TEST(Statistics, FieldAndWeightsMustConform) {
  auto n = cycle4();
  auto w = adjacency(n, 1);
  NodeField f({v(4), v(3), v(2), v(1)}, {1, 2, 3, 4});
  EXPECT_THROW(moran_i(f, w), ContractError);
  EXPECT_NO_THROW(moran_i(f, conform(w, f)));
  EXPECT_THROW(NodeField({v(1), v(2)}, {1, 2}), ContractError);
  EXPECT_THROW(NodeField({v(1), v(2), v(2)}, {1, 2, 3}), ContractError);
  EXPECT_THROW(NodeField({v(1), v(2), v(3)}, {1, NAN, 3}), ContractError);
}

TEST(GetisOrd, LocalSignsOnPath) {
  auto n = path5();
  auto f = field_on(n, {9, 8, 1, 0, 0});
  auto g = getis_g_local(f, adjacency(n, 1));
  EXPECT_GT(g[0], 0.0);
  EXPECT_GT(g[1], 0.0);
  EXPECT_LT(g[3], 0.0);
  EXPECT_LT(g[4], 0.0);
  EXPECT_DOUBLE_EQ(getis_g_local(f, adjacency(n, 1), v(5)), g[4]);
}

TEST(GetisOrd, GlobalOnUniformField) {
  auto n = path5();
  auto w = adjacency(n, 1);
  EXPECT_NEAR(getis_g(field_on(n, {3, 3, 3, 3, 3}), w), w.total() / (5.0 * 4.0), 1e-12);
}

TEST(GetisOrd, Errors) {
  auto n = testkit::net({{1, 0, 0}, {2, 1, 0}, {3, 2, 0}, {4, 9, 9}}, {{1, 1, 2}, {2, 2, 3}});
  auto w = adjacency(n, 1);
  EXPECT_THROW(getis_g_local(field_on(n, {1, 2, 3, 4}), w), UndefinedValueError);
  EXPECT_THROW(getis_g(field_on(n, {1, -2, 3, 4}), w), ContractError);
}

TEST(Oracles, DenseTextbookFormulas) {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 30; ++trial) {
    auto c = random_case(rng, 5 + trial % 12, true);
    const auto& x = c.f.values();
    const auto dense = c.w.dense();
    EXPECT_NEAR(moran_i(c.f, c.w), oracle::moran(x, dense), 1e-10);
    EXPECT_NEAR(geary_c(c.f, c.w), oracle::geary(x, dense), 1e-10);
    EXPECT_NEAR(autocorrelation(c.f, c.w), oracle::autocorrelation(x, dense), 1e-10);
    EXPECT_NEAR(getis_g(c.f, c.w), oracle::getis_global(x, dense), 1e-10);
    const auto li = local_moran(c.f, c.w).values;
    const auto lc = local_geary(c.f, c.w);
    const auto lg = getis_g_local(c.f, c.w);
    const auto oi = oracle::local_moran(x, dense);
    const auto oc = oracle::local_geary(x, dense);
    const auto og = oracle::getis_local(x, dense);
    for (std::size_t i = 0; i < x.size(); ++i) {
      EXPECT_NEAR(li[i], oi[i], 1e-10);
      EXPECT_NEAR(lc[i], oc[i], 1e-10);
      EXPECT_NEAR(lg[i], og[i], 1e-10);
    }
    auto rw = standardize(c.w);
    EXPECT_NEAR(moran_i(c.f, rw), oracle::moran(x, oracle::row_standardize(dense, x.size())), 1e-10);
  }
}

TEST(Identities, LocalMoranSumsToGlobal) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 25; ++trial) {
    auto c = random_case(rng, 6 + trial % 20);
    const double n = static_cast<double>(c.f.size());
    const auto li = local_moran(c.f, c.w).values;
    double sum = 0.0;
    for (double x : li) sum += x;
    const double want = moran_i(c.f, c.w) * c.w.total() * (n - 1.0) / n;
    EXPECT_NEAR(sum, want, 1e-10 * std::max(1.0, std::abs(want)));
  }
}

TEST(Identities, ScatterSlopeIsMoran) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    auto c = random_case(rng, 6 + trial % 20);
    auto rw = standardize(c.w);
    const auto s = moran_scatter(c.f, rw);
    EXPECT_EQ(s.points.size(), c.f.size());
    EXPECT_NEAR(s.slope, moran_i(c.f, rw), 1e-10);
  }
  auto n = cycle4();
  EXPECT_THROW(moran_scatter(field_on(n, {1, 2, 3, 4}), adjacency(n, 1)), ContractError);
}

TEST(Invariance, AffineTransforms) {
  std::mt19937_64 rng(23);
  auto c = random_case(rng, 15);
  const auto base_li = local_moran(c.f, c.w).values;
  const auto base_lc = local_geary(c.f, c.w);
  for (double a : {-2.0, 0.5, 10.0}) {
    for (double b : {-1.0, 3.0}) {
      std::vector<double> y;
      for (double x : c.f.values()) y.push_back(a * x + b);
      NodeField g(c.f.vertices(), y);
      auto rel = [](double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); };
      EXPECT_LT(rel(moran_i(g, c.w), moran_i(c.f, c.w)), 1e-12);
      EXPECT_LT(rel(geary_c(g, c.w), geary_c(c.f, c.w)), 1e-12);
      EXPECT_LT(rel(autocorrelation(g, c.w), autocorrelation(c.f, c.w)), 1e-12);
      const auto li = local_moran(g, c.w).values;
      const auto lc = local_geary(g, c.w);
      for (std::size_t i = 0; i < li.size(); ++i) {
        EXPECT_LT(rel(li[i], base_li[i]), 1e-12);
        EXPECT_LT(rel(lc[i], base_lc[i]), 1e-12);
      }
    }
  }
}

TEST(Invariance, SymmetricWeightsMatchTheirTranspose) {
  std::mt19937_64 rng(29);
  auto c = random_case(rng, 12);
  ASSERT_TRUE(c.w.symmetric());
  const auto dense = c.w.dense();
  const std::size_t n = c.f.size();
  std::vector<double> t(dense.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) t[j * n + i] = dense[i * n + j];
  }
  auto wt = WeightMatrix::from_dense(c.w.vertex_index(), t);
  EXPECT_DOUBLE_EQ(moran_i(c.f, wt), moran_i(c.f, c.w));
  EXPECT_DOUBLE_EQ(geary_c(c.f, wt), geary_c(c.f, c.w));
}

TEST(Permutation, PValueBoundsAndDeterminism) {
  std::mt19937_64 rng(31);
  auto c = random_case(rng, 20);
  PermutationOptions opt{199, 42};
  for (auto stat : {GlobalStatistic::moran, GlobalStatistic::geary, GlobalStatistic::autocorrelation}) {
    auto r1 = permutation_test(stat, c.f, c.w, opt);
    auto r2 = permutation_test(stat, c.f, c.w, opt);
    EXPECT_GE(r1.p_value, 1.0 / 200.0);
    EXPECT_LE(r1.p_value, 1.0);
    EXPECT_EQ(r1.p_value, r2.p_value);
    EXPECT_EQ(r1.null_mean, r2.null_mean);
    EXPECT_EQ(r1.permutations, 199u);
    EXPECT_EQ(r1.seed, 42u);
  }
  EXPECT_THROW(permutation_test(GlobalStatistic::moran, c.f, c.w, {98, 1}), ContractError);
}

TEST(Permutation, StrongPatternIsSignificant) {
  // Two cliques of values joined by one bridge edge.
  auto n = testkit::net({{1, 0, 0}, {2, 1, 0}, {3, 2, 0}, {4, 3, 0}, {5, 4, 0}, {6, 5, 0}, {7, 6, 0}, {8, 7, 0}},
                        {{1, 1, 2}, {2, 2, 3}, {3, 3, 4}, {4, 4, 5}, {5, 5, 6}, {6, 6, 7}, {7, 7, 8}, {8, 1, 3},
                         {9, 2, 4}, {10, 5, 7}, {11, 6, 8}});
  auto f = field_on(n, {10, 11, 10, 12, 0, 1, 0, 1});
  auto r = permutation_test(GlobalStatistic::moran, f, adjacency(n, 1), {999, 3});
  EXPECT_LT(r.p_value, 0.05);
  EXPECT_GT(r.statistic, r.null_mean);
}

TEST(Permutation, AnalyticMatchesMomentsOrder) {
  std::mt19937_64 rng(37);
  auto c = random_case(rng, 30);
  auto a = analytic_test(GlobalStatistic::moran, c.f, c.w);
  EXPECT_NEAR(a.null_mean, -1.0 / 29.0, 1e-12);
  EXPECT_GT(a.null_sd, 0.0);
  EXPECT_NEAR(analytic_test(GlobalStatistic::geary, c.f, c.w).null_mean, 1.0, 1e-12);
  EXPECT_THROW(analytic_test(GlobalStatistic::getis, c.f, c.w), ContractError);
}

TEST(LocalPermutation, ResultsPerVertex) {
  std::mt19937_64 rng(41);
  auto c = random_case(rng, 15, true);
  for (auto stat : {LocalStatistic::moran, LocalStatistic::geary, LocalStatistic::getis}) {
    auto r1 = local_permutation_test(stat, c.f, c.w, {199, 5});
    auto r2 = local_permutation_test(stat, c.f, c.w, {199, 5});
    ASSERT_EQ(r1.size(), c.f.size());
    for (std::size_t i = 0; i < r1.size(); ++i) {
      EXPECT_EQ(r1[i].vertex, c.f.vertices()[i]);
      EXPECT_EQ(r1[i].p_value, r2[i].p_value);
      EXPECT_GE(r1[i].p_value, 1.0 / 200.0);
    }
  }
}

TEST(Correlogram, BonferroniAndAbsentLags) {
  auto n = path5();
  auto f = field_on(n, {1, 3, 2, 5, 4});
  auto rows = correlogram(f, n, GlobalStatistic::moran, 8, {199, 1});
  ASSERT_EQ(rows.size(), 8u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.present, r.lag <= 4);
    if (r.present) EXPECT_DOUBLE_EQ(r.p_bonferroni, std::min(1.0, 8.0 * r.result.p_value));
  }
  auto one = correlogram(f, n, GlobalStatistic::moran, 1, {199, 1});
  EXPECT_DOUBLE_EQ(one[0].p_bonferroni, one[0].result.p_value);
  EXPECT_THROW(correlogram(f, n, GlobalStatistic::moran, 0, {199, 1}), ContractError);
}
