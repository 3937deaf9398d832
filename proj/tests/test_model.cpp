#include <random>

#include "gtest/gtest.h"
#include "scruf/model.hpp"

namespace scruf {
namespace {

StepRecord record_at(std::size_t t) {
  StepRecord r;
  r.time = t;
  r.user_id = "u" + std::to_string(t);
  return r;
}

TEST(History, AppendToEmpty) {
  History h(10);
  h.append(record_at(0));
  EXPECT_EQ(h.size(), 1u);
}

TEST(History, AppendKeepsEarlierRecords) {
  History h(10);
  for (std::size_t t = 0; t < 3; ++t) h.append(record_at(t));
  const auto before = std::vector<std::string>{h.records()[0].user_id, h.records()[1].user_id, h.records()[2].user_id};
  h.append(record_at(3));
  ASSERT_EQ(h.size(), 4u);
  for (std::size_t t = 0; t < 3; ++t) EXPECT_EQ(h.records()[t].user_id, before[t]);
  EXPECT_EQ(h.records().back().time, 3u);
}

TEST(History, RejectsGap) {
  History h(10);
  for (std::size_t t = 0; t < 3; ++t) h.append(record_at(t));
  EXPECT_THROW(h.append(record_at(5)), Error);
  EXPECT_EQ(h.size(), 3u);
}

TEST(History, WindowOfEmptyHistory) {
  History h(10);
  EXPECT_TRUE(h.window().empty());
}

TEST(History, WindowIsSuffix) {
  History h(5);
  for (std::size_t t = 0; t < 7; ++t) h.append(record_at(t));
  const auto w = h.window();
  ASSERT_EQ(w.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(w[i].time, i + 2);
}

TEST(History, WindowLargerThanHistory) {
  History h(5);
  for (std::size_t t = 0; t < 3; ++t) h.append(record_at(t));
  EXPECT_EQ(h.window().size(), 3u);
}

TEST(History, WindowPropertyOverSizes) {
  for (std::size_t w = 1; w <= 12; ++w) {
    History h(w);
    for (std::size_t n = 0; n <= 20; ++n) {
      const auto win = h.window();
      ASSERT_EQ(win.size(), std::min(n, w));
      for (std::size_t i = 0; i < win.size(); ++i) EXPECT_EQ(win[i].time, n - win.size() + i);
      h.append(record_at(n));
    }
  }
}

TEST(History, ZeroWindowRejected) { EXPECT_THROW(History(0), Error); }

TEST(ScoredList, SortedBreaksTiesById) {
  auto l = ScoredList::sorted({{"c", 1.0}, {"a", 1.0}, {"b", 2.0}});
  EXPECT_EQ(l.item_ids(), (std::vector<std::string>{"b", "a", "c"}));
}

TEST(ScoredList, SortingIsIdempotent) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> score(0, 4);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ScoredItem> items;
    const int n = 1 + trial % 15;
    for (int i = 0; i < n; ++i) items.push_back({"i" + std::to_string(i), score(rng) * 0.5});
    std::shuffle(items.begin(), items.end(), rng);
    auto once = ScoredList::sorted(items);
    auto twice = ScoredList::sorted(once.entries());
    EXPECT_EQ(once, twice);
    std::shuffle(items.begin(), items.end(), rng);
    EXPECT_EQ(ScoredList::sorted(items), once);
  }
}

TEST(ScoredList, RejectsDuplicates) {
  EXPECT_THROW(ScoredList::sorted({{"a", 1.0}, {"a", 0.5}}), Error);
  EXPECT_THROW(ScoredList::from_ranked({{"a", 1.0}, {"a", 0.5}}), Error);
}

TEST(ScoredList, FromRankedKeepsTieOrderButRejectsAscent) {
  auto l = ScoredList::from_ranked({{"v5", 0.3}, {"v3", 0.3}});
  EXPECT_EQ(l[0].item_id, "v5");
  EXPECT_THROW(ScoredList::from_ranked({{"a", 0.1}, {"b", 0.2}}), Error);
}

TEST(ScoredList, Top) {
  auto l = ScoredList::sorted({{"a", 3}, {"b", 2}, {"c", 1}});
  EXPECT_EQ(l.top(2).item_ids(), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(l.top(10).size(), 3u);
}

TEST(AgentAllocation, Invariant) {
  EXPECT_NO_THROW(AgentAllocation({{"a", 0.0}, {"b", 0.0}}));
  EXPECT_NO_THROW(AgentAllocation({{"a", 0.25}, {"b", 0.75}}));
  EXPECT_THROW(AgentAllocation({{"a", 0.25}, {"b", 0.25}}), Error);
  EXPECT_THROW(AgentAllocation({{"a", -0.5}, {"b", 1.5}}), Error);
  EXPECT_TRUE(AgentAllocation::none({"a", "b"}).is_empty());
  auto hot = AgentAllocation::one_hot({"a", "b"}, 1);
  EXPECT_EQ(hot.weight("b"), 1.0);
  EXPECT_EQ(hot.weight("a"), 0.0);
  EXPECT_EQ(hot.weight("missing"), 0.0);
}

TEST(UserProfile, CompatibilityRange) {
  UserProfile u{"u", {}, {}};
  EXPECT_NO_THROW(u.set_compatibility("a", 1.0));
  EXPECT_THROW(u.set_compatibility("a", 1.5), Error);
  EXPECT_THROW(u.set_compatibility("a", -0.1), Error);
}

TEST(Catalog, UniqueIds) {
  Catalog c;
  c.add({"v1", {}, {}});
  EXPECT_THROW(c.add({"v1", {}, {}}), Error);
  EXPECT_THROW(c.at("nope"), Error);
  EXPECT_FALSE(c.is_protected("v1", "agent"));
}

}  // namespace
}  // namespace scruf
