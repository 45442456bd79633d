#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "offload/experiment.hpp"

namespace offload {
namespace {

TEST(LinkRates, NoFadingRoundsLongTermRate) {
  Topology t;
  t.add_node(NodeRole::kServer, 1.0);
  t.add_node(NodeRole::kClient, 1.0);
  t.add_node(NodeRole::kClient, 1.0);
  t.add_link(0, 1, 12.4);
  t.add_link(0, 2, 0.2);
  FadingParams f;
  f.sd = 0.0;
  for (int slot = 0; slot < 20; ++slot) {
    EXPECT_EQ(realize_link_rates(1, slot, t, f), (std::vector<int>{12, 1}));
  }
}

TEST(LinkRates, MeanMatchesLongTermRate) {
  const Topology t = sample_long_term_rates(2, generate_topology(2, GenParams{}));
  std::vector<double> sum(t.num_links(), 0.0);
  const int slots = 10000;
  for (int s = 0; s < slots; ++s) {
    const auto r = realize_link_rates(5, s, t, FadingParams{});
    for (std::size_t e = 0; e < r.size(); ++e) {
      sum[e] += r[e];
      const double rate = t.link(static_cast<LinkId>(e)).rate;
      EXPECT_GE(r[e], std::max(1L, std::lround(rate * 0.5)));
      EXPECT_LE(r[e], std::lround(rate * 1.5));
    }
  }
  for (const Link& l : t.links()) {
    EXPECT_NEAR(sum[static_cast<std::size_t>(l.id)] / slots, l.rate, 0.03 * l.rate);
  }
}

TEST(LinkRates, SlotStreamsAreIndependentOfHistory) {
  const Topology t = sample_long_term_rates(2, generate_topology(2, GenParams{}));
  const auto late = realize_link_rates(5, 700, t, FadingParams{});
  for (int s = 0; s < 700; ++s) realize_link_rates(5, s, t, FadingParams{});
  EXPECT_EQ(realize_link_rates(5, 700, t, FadingParams{}), late);
}

TEST(SimConfig, Validation) {
  SimConfig c;
  c.horizon = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = SimConfig{};
  c.load = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Simulator, EmptyNetworkOnlyAdvancesClock) {
  Simulator sim(testing::path3_instance({}), SimConfig{});
  for (int t = 0; t < 10; ++t) {
    sim.step();
    const SlotCounters c = sim.counters();
    EXPECT_EQ(c.created + c.completed + c.queued + c.processing, 0);
  }
  EXPECT_EQ(sim.slot(), 10);
}

TEST(Simulator, SparseJobsProcessedLocallyOnPath3) {
  // Rare arrivals: every job finds the network empty and runs locally in
  // P / mu_0 = 4 slots.
  SimConfig cfg;
  cfg.horizon = 5000;
  cfg.seed = 3;
  const Instance inst = testing::path3_instance({{0, 0, 0.01, std::nullopt}});
  const RunResult r = run(inst, cfg);
  ASSERT_GT(r.jobs.size(), 10u);
  int isolated = 0;
  for (std::size_t k = 0; k < r.jobs.size(); ++k) {
    const Job& j = r.jobs[k];
    if (!j.completion_time) continue;
    const bool alone = (k == 0 || r.jobs[k - 1].arrival_slot + 4 <= j.arrival_slot);
    if (!alone) continue;
    ++isolated;
    EXPECT_EQ(j.processed_at, 0);
    EXPECT_EQ(j.hops, 0);
    EXPECT_NEAR(j.makespan(), 4.0, 1e-9);
  }
  EXPECT_GT(isolated, 10);
}

Instance small_instance(Scenario sc, std::uint64_t seed) {
  ExperimentSpec s;
  s.master_seed = seed;
  s.scenario = sc;
  s.topology.total_nodes = 30;
  s.horizon = 300;
  return make_instance(s, 0, 0);
}

void check_conservation(const Instance& inst, SchemeKind scheme, double load) {
  SimConfig cfg;
  cfg.horizon = 300;
  cfg.scheme = scheme;
  cfg.load = load;
  Simulator sim(inst, cfg);
  while (!sim.done()) {
    sim.step();
    const SlotCounters c = sim.counters();
    ASSERT_EQ(c.created, c.completed + c.queued + c.processing) << to_string(scheme) << " slot " << sim.slot();
    ASSERT_EQ(static_cast<long long>(sim.backlog().size()), sim.slot());
    ASSERT_EQ(sim.backlog().back(), c.queued);
  }
  const RunResult r = sim.finish();
  EXPECT_EQ(static_cast<long long>(r.jobs.size()), r.completed + r.censored);
  for (const Job& j : r.jobs) {
    EXPECT_GE(j.hops, 0);
    if (j.completion_time) {
      EXPECT_GT(j.makespan(), 0.0);
      EXPECT_GT(inst.mu(j.processed_at, j.type), 0.0);
      if (scheme == SchemeKind::kSpbpSpbp || scheme == SchemeKind::kBpSpbp) EXPECT_EQ(j.processed_at, j.destination);
    }
  }
}

TEST(Simulator, ConservationAllSchemes) {
  const Instance two = small_instance(Scenario::kTwoType, 1);
  for (SchemeKind s : {SchemeKind::kJointSpbp, SchemeKind::kSpbpSpbp, SchemeKind::kBpSpbp}) {
    check_conservation(two, s, 2.0);
  }
  const Instance one = small_instance(Scenario::kSingleType, 1);
  for (SchemeKind s : {SchemeKind::kJointSpbp, SchemeKind::kSpbpSpbp, SchemeKind::kBpSpbp, SchemeKind::kJointLp}) {
    check_conservation(one, s, 0.5);
  }
}

TEST(Simulator, Deterministic) {
  const Instance inst = small_instance(Scenario::kTwoType, 4);
  SimConfig cfg;
  cfg.horizon = 200;
  const RunResult a = run(inst, cfg);
  const RunResult b = run(inst, cfg);
  ASSERT_EQ(a.jobs.size(), b.jobs.size());
  for (std::size_t k = 0; k < a.jobs.size(); ++k) {
    EXPECT_EQ(a.jobs[k].completion_time, b.jobs[k].completion_time);
    EXPECT_EQ(a.jobs[k].hops, b.jobs[k].hops);
    EXPECT_EQ(a.jobs[k].processed_at, b.jobs[k].processed_at);
  }
  EXPECT_EQ(a.backlog, b.backlog);
}

TEST(Simulator, SchemesShareArrivals) {
  const Instance inst = small_instance(Scenario::kTwoType, 4);
  SimConfig cfg;
  cfg.horizon = 200;
  const RunResult a = run(inst, cfg);
  cfg.scheme = SchemeKind::kBpSpbp;
  const RunResult b = run(inst, cfg);
  ASSERT_EQ(a.jobs.size(), b.jobs.size());
  for (std::size_t k = 0; k < a.jobs.size(); ++k) {
    EXPECT_EQ(a.jobs[k].arrival_slot, b.jobs[k].arrival_slot);
    EXPECT_EQ(a.jobs[k].source, b.jobs[k].source);
  }
}

TEST(Simulator, JointLpNeedsSingleType) {
  SimConfig cfg;
  cfg.scheme = SchemeKind::kJointLp;
  EXPECT_THROW(Simulator(small_instance(Scenario::kTwoType, 1), cfg), std::invalid_argument);
}

TEST(Simulator, JointLpInfeasibleIsReported) {
  SimConfig cfg;
  cfg.scheme = SchemeKind::kJointLp;
  cfg.load = 4.0;
  const Instance inst = testing::path3_instance({{0, 0, 1.0, std::nullopt}});
  EXPECT_THROW(Simulator(inst, cfg), LpInfeasibleError);
  const RunResult r = run(inst, cfg);
  EXPECT_TRUE(r.lp_infeasible);
  EXPECT_TRUE(r.jobs.empty());
}

TEST(Simulator, SeparatedSchemeSendsJobsToDestinations) {
  // Path3 with a client that cannot compute: every job must cross two hops.
  testing::Path3 p;
  Instance inst = testing::path3_instance({{0, 0, 0.3, std::nullopt}});
  inst.mu.set(0, 0, 0.0);
  SimConfig cfg;
  cfg.horizon = 400;
  cfg.scheme = SchemeKind::kSpbpSpbp;
  const RunResult r = run(inst, cfg);
  ASSERT_GT(r.completed, 50);
  for (const Job& j : r.jobs) {
    EXPECT_EQ(j.destination, 2);
    if (j.completion_time) {
      EXPECT_EQ(j.hops, 2);
      EXPECT_EQ(j.processed_at, 2);
    }
  }
}

TEST(Simulator, StepPastHorizonThrows) {
  SimConfig cfg;
  cfg.horizon = 1;
  Simulator sim(testing::path3_instance({}), cfg);
  sim.step();
  EXPECT_TRUE(sim.done());
  EXPECT_THROW(sim.step(), std::logic_error);
}

}  // namespace
}  // namespace offload
