#include <gtest/gtest.h>

#include <random>

#include "build.hpp"
#include "netlisna/errors.hpp"
#include "netlisna/pattern.hpp"
#include "oracles.hpp"

using namespace netlisna;
using testkit::e;
using testkit::v;

TEST(Snap, MidpointOfLoneSegment) {
  auto n = testkit::net({{1, 0, 0}, {2, 2, 0}}, {{1, 1, 2}});
  const std::vector<Event> evs{{1.0, 0.0, 0, {}}};
  auto p = snap(n, evs);
  EXPECT_EQ(count_edge(p, e(1)), 1);
  ASSERT_EQ(p.snap_report().size(), 1u);
  EXPECT_EQ(p.snap_report()[0].distance, 0.0);
  EXPECT_TRUE(p.snap_report()[0].accepted);
}

TEST(Snap, EquidistantParallelEdgesTakeSmallestId) {
  auto n = testkit::net({{1, 0, 0}, {2, 4, 0}, {3, 0, 2}, {4, 4, 2}}, {{7, 1, 2}, {3, 3, 4}});
  const std::vector<Event> evs{{2.0, 1.0, 0, {}}};
  auto p = snap(n, evs);
  EXPECT_EQ(p.snap_report()[0].edge, e(3));
  EXPECT_DOUBLE_EQ(p.snap_report()[0].distance, 1.0);
}

TEST(Snap, VertexEventUsesSmallestIncidentEdge) {
  auto n = testkit::net({{1, 0, 0}, {2, 1, 0}, {3, 0, 1}}, {{5, 1, 2}, {2, 1, 3}});
  const std::vector<Event> evs{{0.0, 0.0, 0, {}}};
  EXPECT_EQ(snap(n, evs).snap_report()[0].edge, e(2));
}

TEST(Snap, CutoffRejectsAndConservesTotal) {
  auto n = testkit::net({{1, 0, 0}, {2, 2, 0}}, {{1, 1, 2}});
  const std::vector<Event> evs{{1.0, 0.5, 0, {}}, {1.0, 3.0, 0, {}}, {5.0, 0.0, 0, {}}};
  auto p = snap(n, evs, 1.0);
  std::size_t accepted = 0;
  for (const auto& r : p.snap_report()) accepted += r.accepted;
  EXPECT_EQ(accepted, 1u);
  EXPECT_EQ(p.snap_report().size(), evs.size());
  EXPECT_EQ(p.total(), 1);
}

TEST(Snap, AllRejectedIsEmptyPattern) {
  auto n = testkit::net({{1, 0, 0}, {2, 2, 0}}, {{1, 1, 2}});
  const std::vector<Event> evs{{1.0, 9.0, 0, {}}};
  auto p = snap(n, evs, 0.5);
  EXPECT_EQ(p.total(), 0);
}

TEST(Snap, ErrorsOnEmptyNetworkOrNegativeCutoff) {
  auto empty = testkit::net({{1, 0, 0}}, {});
  const std::vector<Event> evs{{0.0, 0.0, 0, {}}};
  EXPECT_THROW(snap(empty, evs), ContractError);
  auto n = testkit::net({{1, 0, 0}, {2, 2, 0}}, {{1, 1, 2}});
  EXPECT_THROW(snap(n, evs, -1.0), ContractError);
}

TEST(Snap, MatchesExhaustiveNearestSegment) {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> coord(-1.0, 11.0);
  for (int trial = 0; trial < 30; ++trial) {
    auto n = oracle::random_connected_network(rng, 6 + trial % 8, 6, 0.3);
    std::vector<Event> evs;
    for (int i = 0; i < 200; ++i) evs.push_back({coord(rng), coord(rng), 0, {}});
    auto p = snap(n, evs);
    for (std::size_t i = 0; i < evs.size(); ++i) {
      const auto want = oracle::nearest_edge(n, evs[i].x, evs[i].y);
      EXPECT_EQ(p.snap_report()[i].edge, want.edge);
      EXPECT_NEAR(p.snap_report()[i].distance, want.distance, 1e-12);
    }
  }
}

TEST(Snap, IsIdempotent) {
  std::mt19937_64 rng(4321);
  std::uniform_real_distribution<double> coord(0.0, 10.0);
  auto n = oracle::random_connected_network(rng, 12, 8, 0.5);
  std::vector<Event> evs;
  for (int i = 0; i < 300; ++i) evs.push_back({coord(rng), coord(rng), i % 3, {}});
  auto first = snap(n, evs);
  std::vector<Event> snapped;
  for (std::size_t i = 0; i < evs.size(); ++i) {
    const auto& r = first.snap_report()[i];
    snapped.push_back({r.snapped_x, r.snapped_y, evs[i].replicate, {}});
  }
  auto second = snap(n, snapped);
  for (std::size_t i = 0; i < evs.size(); ++i) {
    EXPECT_EQ(second.snap_report()[i].edge, first.snap_report()[i].edge);
    EXPECT_NEAR(second.snap_report()[i].distance, 0.0, 1e-9);
  }
}

TEST(Snap, ReplicatesNeedNotBeContiguous) {
  auto n = testkit::net({{1, 0, 0}, {2, 2, 0}}, {{1, 1, 2}});
  const std::vector<Event> evs{{1.0, 0.0, 2, {}}, {1.5, 0.0, 0, {}}, {0.5, 0.0, 2, {}}};
  auto p = snap(n, evs);
  EXPECT_EQ(p.replicates(), (std::vector<Replicate>{0, 2}));
  EXPECT_EQ(count_edge(p, e(1), 2), 2);
  EXPECT_EQ(count_edge(p, e(1), 0), 1);
  EXPECT_THROW(count_edge(p, e(1), 1), LookupError);
}

TEST(CountEdge, EmptyAndAccounting) {
  auto n = oracle::mixed_fixture();
  auto empty = SnappedPattern::empty(n);
  EXPECT_EQ(count_edge(empty, e(4)), 0);
  auto p = testkit::replicated(n, {{4, 0, 1, 2, 3, 0, 0, 0, 0, 0, 1, 1, 0, 2}, {1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1}});
  EXPECT_EQ(count_edge(p, e(1), 0), 4);
  for (Replicate r : {0, 1}) {
    std::int64_t sum = 0;
    for (const auto& ed : n.edges()) sum += count_edge(p, ed.id, r);
    EXPECT_EQ(sum, p.total(r));
  }
  EXPECT_EQ(p.total(), p.total(0) + p.total(1));
  EXPECT_THROW(count_edge(p, e(99)), LookupError);
}

TEST(CountIncident, StarAllSelector) {
  auto n = testkit::net({{1, 0, 0}, {2, 1, 0}, {3, 0, 2}, {4, -3, 0}}, {{1, 1, 2}, {2, 1, 3}, {3, 1, 4}});
  auto p = testkit::counts(n, {1, 2, 3});
  auto cl = count_incident(p, v(1), IncidentSelector::neighborhood());
  EXPECT_EQ(cl.count, 6);
  EXPECT_DOUBLE_EQ(cl.length, 6.0);
}

TEST(CountIncident, InOutFamily) {
  auto n = testkit::net({{1, 0, 0}, {2, 1, 0}, {3, 2, 0}}, {{1, 1, 2, true}, {2, 2, 3, true}});
  auto p = testkit::counts(n, {2, 5});
  EXPECT_EQ(count_incident(p, v(2), IncidentSelector::parents()).count, 2);
  EXPECT_EQ(count_incident(p, v(2), IncidentSelector::children()).count, 5);
  EXPECT_EQ(count_incident(p, v(2), IncidentSelector::family()).count, 7);
  auto none = count_incident(p, v(2), IncidentSelector::neighborhood());
  EXPECT_EQ(none.count, 0);
  EXPECT_EQ(none.length, 0.0);
}

TEST(CountIncident, EqualsSumOverIncidentEdges) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> cnt(0, 6);
  for (int trial = 0; trial < 20; ++trial) {
    auto n = oracle::random_network(rng, 8, 0.4, 0.5);
    std::vector<std::int64_t> c(n.edge_count());
    for (auto& x : c) x = cnt(rng);
    auto p = testkit::counts(n, c);
    for (const auto& vx : n.vertices()) {
      for (auto sel : {IncidentSelector::neighborhood(), IncidentSelector::parents(), IncidentSelector::children(),
                       IncidentSelector::family(), IncidentSelector::all()}) {
        std::int64_t want = 0;
        double len = 0.0;
        for (auto id : incident_edges(n, vx.id, sel)) {
          want += count_edge(p, id);
          len += n.edge(id).length;
        }
        auto got = count_incident(p, vx.id, sel);
        EXPECT_EQ(got.count, want);
        EXPECT_DOUBLE_EQ(got.length, len);
      }
    }
  }
}

TEST(CountPath, Variants) {
  auto n = testkit::net({{1, 0, 0}, {2, 1, 0}, {3, 2, 0}}, {{1, 1, 2, true}, {2, 2, 3, true}});
  auto p = testkit::counts(n, {3, 4});
  const std::vector<VertexId> seq{v(1), v(2), v(3)};
  auto path = make_path(n, seq);
  EXPECT_EQ(count_path(p, path).count, 7);
  EXPECT_EQ(count_path(p, path, PathVariant::minus_terminal).count, 3);
  EXPECT_EQ(count_path(p, path, PathVariant::minus_origin).count, 4);
}

TEST(CountPath, SingleEdgeMinusTerminalIsEmpty) {
  auto n = testkit::net({{1, 0, 0}, {2, 1, 0}}, {{1, 1, 2, true}});
  auto p = testkit::counts(n, {5});
  const std::vector<VertexId> seq{v(1), v(2)};
  auto cl = count_path(p, make_path(n, seq), PathVariant::minus_terminal);
  EXPECT_EQ(cl.count, 0);
  EXPECT_EQ(cl.length, 0.0);
}

TEST(CountPath, FullEqualsMinusTerminalPlusLastEdge) {
  std::mt19937_64 rng(71);
  std::uniform_int_distribution<int> cnt(0, 9);
  auto n = oracle::random_connected_network(rng, 10, 8, 0.0);
  std::vector<std::int64_t> c(n.edge_count());
  for (auto& x : c) x = cnt(rng);
  auto p = testkit::counts(n, c);
  const auto vs = n.vertices();
  for (std::size_t i = 0; i < vs.size(); ++i) {
    for (std::size_t j = i + 1; j < vs.size(); ++j) {
      auto path = shortest_path(n, vs[i].id, vs[j].id, Traversal::undirected);
      const auto full = count_path(p, path);
      const auto minus = count_path(p, path, PathVariant::minus_terminal);
      EXPECT_EQ(full.count, minus.count + count_edge(p, path.edges.back()));
      EXPECT_NEAR(full.length, minus.length + n.edge(path.edges.back()).length, 1e-12);
    }
  }
}

TEST(SnappedPattern, ValidatesShape) {
  auto n = testkit::net({{1, 0, 0}, {2, 1, 0}}, {{1, 1, 2}});
  EXPECT_THROW(SnappedPattern(n, {0}, {{1, 2}}), ContractError);
  EXPECT_THROW(SnappedPattern(n, {0}, {{-1}}), ContractError);
  EXPECT_THROW(SnappedPattern(n, {0, 0}, {{1}, {1}}), ContractError);
}
