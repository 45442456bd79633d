#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "offload/spbp.hpp"

namespace offload {
namespace {

using testing::Path3;

TEST(BiasTable, Path3Values) {
  Path3 p;
  const BiasTable b = compute_bias_table(p.extended());
  EXPECT_NEAR(b.rbar(), 2.25, 1e-12);
  EXPECT_NEAR(b.rmax(), 4.0, 1e-12);
  EXPECT_NEAR(b.wireless_sigma(0), 4.5, 1e-9);
  EXPECT_NEAR(b.wireless_sigma(1), 4.5, 1e-9);
  ASSERT_EQ(b.virtual_sigma().size(), 2u);
  EXPECT_NEAR(b.virtual_sigma()[0], 9.0, 1e-9);
  EXPECT_NEAR(b.virtual_sigma()[1], 2.25, 1e-9);
  EXPECT_NEAR(b.to_sink(0, 0), 9.0, 1e-9);
  EXPECT_NEAR(b.to_sink(1, 0), 6.75, 1e-9);
  EXPECT_NEAR(b.to_sink(2, 0), 2.25, 1e-9);
  EXPECT_EQ(b.to_sink(3, 0), 0.0);
}

TEST(BiasTable, EqualRatesGiveSigmaR) {
  Topology t;
  t.add_node(NodeRole::kServer, 1.0);
  t.add_node(NodeRole::kClient, 1.0);
  t.add_link(0, 1, 3.0);
  ServiceRates mu(2, 1);
  mu.set(0, 0, 3.0);
  mu.set(1, 0, 3.0);
  const BiasTable b = compute_bias_table(build_extended_graph(t, mu, 1));
  EXPECT_DOUBLE_EQ(b.wireless_sigma(0), 3.0);
  for (double s : b.virtual_sigma()) EXPECT_DOUBLE_EQ(s, 3.0);
}

ExtendedGraph random_extended(std::mt19937_64& rng, int n, int types) {
  const Topology t = testing::random_topology(rng, n, 0.2);
  ServiceScheme scheme = types == 1 ? ServiceScheme::single_type() : ServiceScheme::two_type();
  return build_extended_graph(t, derive_typed_service_rates(t, scheme), types);
}

TEST(BiasTable, MatchesDijkstraAndTriangleOnRandomGraphs) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const ExtendedGraph eg = random_extended(rng, 3 + trial % 15, 1 + trial % 2);
    const BiasTable b = compute_bias_table(eg);
    const auto ref = testing::dijkstra_all(eg);
    const std::size_t n = eg.num_vertices();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (std::isinf(ref[i][j])) {
          EXPECT_TRUE(std::isinf(b.distance(i, j)));
        } else {
          EXPECT_NEAR(b.distance(i, j), ref[i][j], 1e-9 * std::max(1.0, ref[i][j]));
        }
      }
    }
    for (TypeId c = 0; c < eg.num_types(); ++c) {
      const auto sink = static_cast<std::size_t>(eg.sink(c));
      EXPECT_EQ(b.to_sink(sink, c), 0.0);
      for (std::size_t i = 0; i < eg.num_physical(); ++i) {
        for (std::size_t j = 0; j < eg.num_physical(); ++j) {
          EXPECT_LE(b.to_sink(i, c), b.distance(i, j) + b.to_sink(j, c) + 1e-9);
        }
      }
    }
  }
}

QueueState path3_queues(int q1, int q2) { return QueueState(3, 1, {0, q1, q2}); }

TEST(SelectCommodities, Path3Example) {
  Path3 p;
  const BiasTable b = compute_bias_table(p.extended());
  const auto sel = select_commodities(p.topo, path3_queues(5, 1), b.sink_bias());
  const LinkChoice fwd = sel[static_cast<std::size_t>(arc_index(1, false))];
  EXPECT_EQ(fwd.commodity, 0);
  EXPECT_NEAR(fwd.weight, 8.5, 1e-9);
  EXPECT_EQ(sel[static_cast<std::size_t>(arc_index(1, true))].weight, 0.0);
}

TEST(SelectCommodities, EmptyQueuesClampUphill) {
  Path3 p;
  const BiasTable b = compute_bias_table(p.extended());
  const auto sel = select_commodities(p.topo, path3_queues(0, 0), b.sink_bias());
  // B_2 < B_1: moving 2 -> 1 goes uphill.
  EXPECT_EQ(sel[static_cast<std::size_t>(arc_index(1, true))].weight, 0.0);
}

TEST(SelectCommodities, TiesGoToTypeZero) {
  testing::Path3 p;
  BiasMatrix bias(3, 2);
  const QueueState qs(3, 2, {0, 0, 4, 4, 0, 0});
  const auto sel = select_commodities(p.topo, qs, bias);
  EXPECT_EQ(sel[static_cast<std::size_t>(arc_index(1, false))].commodity, 0);
  EXPECT_EQ(sel[static_cast<std::size_t>(arc_index(1, false))].weight, 4.0);
}

TEST(SelectCommodities, ShiftInvariance) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Topology t = testing::random_topology(rng, 8, 0.3);
    const std::size_t types = 3;
    std::vector<int> q(t.num_nodes() * types);
    for (int& x : q) x = static_cast<int>(rng() % 20);
    BiasMatrix bias(t.num_nodes(), types);
    for (NodeId v = 0; v < static_cast<NodeId>(t.num_nodes()); ++v) {
      for (int c = 0; c < 3; ++c) bias(v, c) = static_cast<double>(rng() % 50) / 4.0;
    }
    const int shift = static_cast<int>(rng() % 100);
    std::vector<int> shifted = q;
    for (int& x : shifted) x += shift;
    const auto a = select_commodities(t, QueueState(t.num_nodes(), types, q), bias);
    const auto b = select_commodities(t, QueueState(t.num_nodes(), types, shifted), bias);
    for (std::size_t k = 0; k < a.size(); ++k) {
      EXPECT_EQ(a[k].commodity, b[k].commodity);
      EXPECT_DOUBLE_EQ(a[k].weight, b[k].weight);
    }
  }
}

TEST(Utilities, Path3Example) {
  Path3 p;
  const BiasTable b = compute_bias_table(p.extended());
  const QueueState qs = path3_queues(5, 1);
  const auto sel = select_commodities(p.topo, qs, b.sink_bias());
  const std::vector<int> rates{3, 3};
  const auto u = build_utilities(p.topo, sel, qs, rates);
  EXPECT_NEAR(u[1].value, 25.5, 1e-9);
  EXPECT_FALSE(u[1].reverse);
}

TEST(Utilities, IndicatorZeroesEmptySender) {
  Topology t;
  t.add_node(NodeRole::kServer, 1.0);
  t.add_node(NodeRole::kClient, 1.0);
  t.add_link(0, 1, 1.0);
  BiasMatrix bias(2, 1);
  bias(0, 0) = 10.0;  // w_01 > 0 from the bias alone, but Q_0 = 0
  const QueueState qs(2, 1, {0, 0});
  const auto sel = select_commodities(t, qs, bias);
  EXPECT_GT(sel[static_cast<std::size_t>(arc_index(0, false))].weight, 0.0);
  const std::vector<int> rates{3};
  EXPECT_EQ(build_utilities(t, sel, qs, rates)[0].value, 0.0);
}

ConflictGraph path_conflicts() {
  ConflictGraph cg(3);
  cg.add_conflict(0, 1);
  cg.add_conflict(1, 2);
  return cg;
}

TEST(Lgs, PathExample) {
  const std::vector<double> u{5, 6, 4};
  const Schedule s = lgs_schedule(path_conflicts(), u);
  EXPECT_EQ(s.links(), std::vector<LinkId>{1});
  EXPECT_EQ(s.total(u), 6.0);
}

TEST(Lgs, NoConflictsSchedulesAll) {
  const std::vector<double> u{5, 6, 4};
  EXPECT_EQ(lgs_schedule(ConflictGraph(3), u).links(), (std::vector<LinkId>{0, 1, 2}));
}

TEST(Lgs, ZeroUtilitiesEmpty) {
  const std::vector<double> u{0, 0, 0};
  EXPECT_TRUE(lgs_schedule(path_conflicts(), u).links().empty());
}

TEST(Mwis, PathExample) {
  const std::vector<double> u{5, 6, 4};
  const Schedule s = mwis_bruteforce(path_conflicts(), u);
  EXPECT_EQ(s.links(), (std::vector<LinkId>{0, 2}));
  EXPECT_EQ(s.total(u), 9.0);
}

TEST(Mwis, Degenerate) {
  EXPECT_EQ(mwis_bruteforce(ConflictGraph(1), std::vector<double>{2.0}).links(), std::vector<LinkId>{0});
  EXPECT_TRUE(mwis_bruteforce(ConflictGraph(1), std::vector<double>{0.0}).links().empty());
  EXPECT_TRUE(mwis_bruteforce(ConflictGraph(0), std::vector<double>{}).links().empty());
}

TEST(Lgs, PropertiesAgainstMwisOracle) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> util(0.0, 10.0);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 12);
    const ConflictGraph cg = testing::random_conflict_graph(rng, n, 0.1 + 0.1 * (trial % 6));
    std::vector<double> u(static_cast<std::size_t>(n));
    for (double& x : u) x = rng() % 4 == 0 ? 0.0 : util(rng);
    const Schedule g = lgs_schedule(cg, u);
    const Schedule m = mwis_bruteforce(cg, u);
    EXPECT_TRUE(g.independent_in(cg));
    EXPECT_TRUE(m.independent_in(cg));
    EXPECT_LE(g.total(u), m.total(u) + 1e-12);
    EXPECT_NEAR(m.total(u), testing::mwis_value_oracle(cg, u), 1e-9);
    // Maximality over positive-utility links.
    for (LinkId e = 0; e < n; ++e) {
      if (g.active(e) || u[static_cast<std::size_t>(e)] <= 0.0) continue;
      bool blocked = false;
      for (LinkId f : cg.conflicts(e)) blocked = blocked || g.active(f);
      EXPECT_TRUE(blocked) << "trial " << trial << " link " << e;
    }
  }
}

TEST(TransmitPlan, QuotaRules) {
  Path3 p;
  const BiasTable b = compute_bias_table(p.extended());
  const QueueState qs = path3_queues(1, 0);
  const std::vector<int> rates{3, 3};
  const SlotDecision d = spbp_decide(p.topo, p.cg, qs, b.sink_bias(), rates);
  ASSERT_EQ(d.plan.size(), 1u);
  EXPECT_EQ(d.plan[0].link, 1);
  EXPECT_EQ(d.plan[0].from, 1);
  EXPECT_EQ(d.plan[0].to, 2);
  EXPECT_EQ(d.plan[0].quota, 3);

  // Scheduled, but both chosen directions are uphill (w = 0): no transfer.
  Schedule all(2);
  all.set(0);
  all.set(1);
  const QueueState empty = path3_queues(0, 0);
  const auto sel = select_commodities(p.topo, empty, b.sink_bias());
  const std::vector<LinkUtility> uphill{{0.0, true}, {0.0, true}};
  EXPECT_TRUE(make_transmit_plan(p.topo, all, sel, uphill, rates).empty());
  const auto u = build_utilities(p.topo, sel, empty, rates);
  // Unscheduled link: no entry.
  EXPECT_TRUE(make_transmit_plan(p.topo, Schedule(2), sel, u, rates).empty());
}

}  // namespace
}  // namespace offload
