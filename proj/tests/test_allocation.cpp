#include <cmath>

#include "gtest/gtest.h"
#include "scruf/allocation.hpp"

namespace scruf {
namespace {

AllocationInput input(std::vector<double> m, std::vector<double> c = {}) {
  AllocationInput in;
  for (std::size_t i = 0; i < m.size(); ++i) {
    in.agents.push_back({std::string(1, static_cast<char>('A' + i)), m[i], c.empty() ? 1.0 : c[i]});
  }
  return in;
}

void expect_valid(const AgentAllocation& a) {
  double total = 0.0;
  for (const auto& w : a.weights()) {
    EXPECT_GE(w.weight, 0.0);
    EXPECT_LE(w.weight, 1.0);
    total += w.weight;
  }
  EXPECT_TRUE(total == 0.0 || std::abs(total - 1.0) < 1e-9) << total;
}

TEST(LeastFair, PicksMinimum) {
  const auto a = allocate_least_fair(input({0.2, 0.7}));
  EXPECT_EQ(a.weight("A"), 1.0);
  EXPECT_EQ(a.weight("B"), 0.0);
}

TEST(LeastFair, TieGoesToFirstRegistered) {
  const auto a = allocate_least_fair(input({0.5, 0.5}));
  EXPECT_EQ(a.weight("A"), 1.0);
  EXPECT_EQ(a.weight("B"), 0.0);
}

TEST(LeastFair, AllFairIsEmpty) {
  EXPECT_TRUE(allocate_least_fair(input({1.0, 1.0})).is_empty());
  EXPECT_TRUE(allocate_least_fair(input({})).is_empty());
}

TEST(LeastFair, IgnoresCompatibility) {
  const auto a = allocate_least_fair(input({0.2, 0.7}, {0.0, 1.0}));
  EXPECT_EQ(a.weight("A"), 1.0);
}

TEST(LeastFair, InvariantUnderMonotoneRescaling) {
  Rng rng(17);
  std::uniform_real_distribution<double> u(0.0, 0.99);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> m(2 + trial % 4);
    for (auto& x : m) x = std::round(u(rng) * 10.0) / 10.0;  // coarse grid forces ties
    std::vector<double> scaled;
    for (double x : m) scaled.push_back(0.1 + 0.8 * x * x);
    const auto a = allocate_least_fair(input(m));
    const auto b = allocate_least_fair(input(scaled));
    for (const auto& w : a.weights()) EXPECT_EQ(w.weight, b.weight(w.agent));
  }
}

TEST(Lottery, DegenerateProductsPickOnlyCandidate) {
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const auto a = allocate_lottery(input({0.5, 1.0}, {0.8, 0.9}), rng);
    EXPECT_EQ(a.weight("A"), 1.0);
    EXPECT_EQ(a.weight("B"), 0.0);
  }
}

TEST(Lottery, AllFairIsEmpty) {
  Rng rng(1);
  EXPECT_TRUE(allocate_lottery(input({1.0, 1.0}, {0.3, 0.9}), rng).is_empty());
}

TEST(Lottery, EvenSplitFrequency) {
  Rng rng(2024);
  int hits = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) hits += allocate_lottery(input({0.0, 0.0}, {0.5, 0.5}), rng).weight("A") == 1.0;
  EXPECT_NEAR(static_cast<double>(hits) / n, 0.5, 0.02);
}

TEST(Lottery, OneDrawPerCall) {
  Rng a(9);
  Rng b(9);
  allocate_lottery(input({0.1, 0.4}, {0.5, 0.5}), a);
  b();
  EXPECT_EQ(a(), b());
}

TEST(Lottery, Deterministic) {
  Rng a(5);
  Rng b(5);
  for (int i = 0; i < 50; ++i) {
    const auto x = allocate_lottery(input({0.1, 0.4, 0.3}, {0.5, 0.9, 0.2}), a);
    const auto y = allocate_lottery(input({0.1, 0.4, 0.3}, {0.5, 0.9, 0.2}), b);
    EXPECT_EQ(x.weights().size(), y.weights().size());
    for (const auto& w : x.weights()) EXPECT_EQ(w.weight, y.weight(w.agent));
  }
}

TEST(Weighted, Proportional) {
  const auto a = allocate_weighted(input({0.5, 0.75}, {0.8, 0.8}));
  EXPECT_NEAR(a.weight("A"), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(a.weight("B"), 1.0 / 3.0, 1e-12);
}

TEST(Weighted, SingleAgentGetsEverything) {
  EXPECT_EQ(allocate_weighted(input({0.3}, {0.4})).weight("A"), 1.0);
}

TEST(Weighted, AllFairIsEmpty) { EXPECT_TRUE(allocate_weighted(input({1.0, 1.0})).is_empty()); }

TEST(Allocation, AlwaysValid) {
  Rng rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> m(1 + trial % 5);
    std::vector<double> c(m.size());
    for (auto& x : m) x = u(rng) < 0.2 ? 1.0 : u(rng);
    for (auto& x : c) x = u(rng) < 0.2 ? 0.0 : u(rng);
    for (auto mech : {AllocationMechanism::kNone, AllocationMechanism::kLeastFair, AllocationMechanism::kLottery,
                      AllocationMechanism::kWeighted}) {
      expect_valid(allocate(mech, input(m, c), rng));
    }
  }
}

TEST(Allocation, LotteryMatchesWeightedInExpectation) {
  Rng rng(123);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const auto in = input({u(rng), u(rng), u(rng)}, {u(rng), u(rng), u(rng)});
    const auto expected = allocate_weighted(in);
    std::map<std::string, double> freq;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
      const auto drawn = allocate_lottery(in, rng);
      for (const auto& w : drawn.weights()) freq[w.agent] += w.weight / n;
    }
    for (const auto& w : expected.weights()) EXPECT_NEAR(freq[w.agent], w.weight, 0.02);
  }
}

TEST(Allocation, Names) {
  EXPECT_EQ(parse_allocation_mechanism("least_fair"), AllocationMechanism::kLeastFair);
  EXPECT_EQ(to_string(AllocationMechanism::kWeighted), "weighted");
  EXPECT_THROW(parse_allocation_mechanism("random"), Error);
}

TEST(UniformUnit, InRange) {
  Rng rng(0);
  for (int i = 0; i < 10000; ++i) {
    const double x = uniform_unit(rng);
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
  }
}

}  // namespace
}  // namespace scruf
