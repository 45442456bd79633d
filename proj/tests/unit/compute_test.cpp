#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "offload/compute.hpp"

namespace offload {
namespace {

TEST(PickCommodity, LargestBacklogPerRate) {
  const std::vector<int> q{4, 3};
  const std::vector<double> mu{2.0, 1.0};
  EXPECT_EQ(pick_commodity(q, mu), 1);
}

TEST(PickCommodity, EmptyQueues) {
  const std::vector<int> q{0, 0};
  const std::vector<double> mu{2.0, 1.0};
  EXPECT_EQ(pick_commodity(q, mu), std::nullopt);
}

TEST(PickCommodity, IneligibleTypeSkipped) {
  const std::vector<int> q{1, 7};
  const std::vector<double> mu{2.0, 0.0};
  EXPECT_EQ(pick_commodity(q, mu), 0);
}

TEST(PickCommodity, TiesToLowestType) {
  const std::vector<int> q{2, 4};
  const std::vector<double> mu{1.0, 2.0};
  EXPECT_EQ(pick_commodity(q, mu), 0);
}

void fill(QueueBank& q, int type, int n, JobId& next) {
  for (int i = 0; i < n; ++i) q.enqueue(0, type, next++);
}

TEST(ComputeNode, DurationIsProcessorsOverRate) {
  ComputeNode node(0, 4, {2.0});
  EXPECT_DOUBLE_EQ(node.duration(0), 2.0);
}


TEST(ComputeNode, SaturatedThroughput) {
  for (const auto& [p, mu] : std::vector<std::pair<int, double>>{{4, 2.0}, {4, 7.3}, {1, 0.75}, {3, 4.8}}) {
    ComputeNode node(0, p, {mu});
    QueueBank q(1, 1);
    JobId next = 0;
    std::vector<Completion> done;
    long long completed = 0;
    for (int t = 0; t < 1000; ++t) {
      fill(q, 0, static_cast<int>(std::ceil(mu)) + 2, next);
      done.clear();
      node.step(t, t + 1.0, q, done);
      completed += static_cast<long long>(done.size());
    }
    const double rate = static_cast<double>(completed) / 1000.0;
    EXPECT_NEAR(rate, mu, 0.02 * mu) << "P=" << p << " mu=" << mu;
    const double d = p / mu;
    const long long oracle = p * static_cast<long long>(std::floor((1000.0 + 1e-9) / d));
    EXPECT_LE(std::llabs(completed - oracle), p) << "P=" << p << " mu=" << mu;
  }
}

TEST(ComputeNode, IdleWithoutWork) {
  ComputeNode node(0, 4, {2.0, 1.0});
  QueueBank q(1, 2);
  std::vector<Completion> done;
  for (int t = 0; t < 50; ++t) node.step(t, t + 1.0, q, done);
  EXPECT_TRUE(done.empty());
  EXPECT_EQ(node.busy(), 0);
}

TEST(ComputeNode, CompletesEachJobOnceWithPositiveMakespan) {
  ComputeNode node(0, 2, {3.0, 1.5});
  QueueBank q(1, 2);
  JobId next = 0;
  std::vector<Completion> done;
  std::mt19937_64 rng(4);
  for (int t = 0; t < 300; ++t) {
    fill(q, static_cast<int>(rng() % 2), static_cast<int>(rng() % 4), next);
    node.step(t, t + 1.0, q, done);
  }
  std::vector<int> seen(static_cast<std::size_t>(next), 0);
  for (const Completion& c : done) {
    ++seen[static_cast<std::size_t>(c.job)];
    EXPECT_GT(c.finish_time, c.fetch_time);
    EXPECT_NEAR(c.finish_time - c.fetch_time, c.type == 0 ? 2.0 / 3.0 : 2.0 / 1.5, 1e-9);
  }
  for (int s : seen) EXPECT_LE(s, 1);
}

TEST(ComputeNode, WindowThroughputBounded) {
  ComputeNode node(0, 4, {5.0});
  QueueBank q(1, 1);
  JobId next = 0;
  std::vector<Completion> done;
  std::vector<long long> per_slot;
  for (int t = 0; t < 1000; ++t) {
    fill(q, 0, 8, next);
    done.clear();
    node.step(t, t + 1.0, q, done);
    per_slot.push_back(static_cast<long long>(done.size()));
  }
  for (int start = 0; start + 100 <= 1000; start += 50) {
    long long n = 0;
    for (int t = start; t < start + 100; ++t) n += per_slot[static_cast<std::size_t>(t)];
    EXPECT_LE(static_cast<double>(n) / 100.0, 5.0 * 1.05);
  }
}

TEST(ComputeNode, SingleEligibleTypeAlwaysServed) {
  ComputeNode node(0, 1, {0.0, 2.0});
  QueueBank q(1, 2);
  JobId next = 0;
  fill(q, 0, 5, next);  // cannot run here
  fill(q, 1, 3, next);
  std::vector<Completion> done;
  for (int t = 0; t < 10; ++t) node.step(t, t + 1.0, q, done);
  ASSERT_EQ(done.size(), 3u);
  for (const Completion& c : done) EXPECT_EQ(c.type, 1);
  EXPECT_EQ(q.size(0, 0), 5);
}

}  // namespace
}  // namespace offload
