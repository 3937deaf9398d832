#include <cmath>
#include <filesystem>
#include <set>

#include "gtest/gtest.h"
#include "scruf/synthetic.hpp"
#include "scruf/text_io.hpp"

namespace scruf::synthetic {
namespace {

GeneratorSpec small_spec(std::uint64_t seed = 1) {
  GeneratorSpec s;
  s.n_users = 60;
  s.n_items = 200;
  s.k_factors = 6;
  s.k_sensitive = 2;
  s.segments = {{"A", 20, {{0, {0.1, 0.1}}, {1, {0.9, 0.1}}}},
                {"B", 20, {{0, {0.9, 0.1}}, {1, {0.1, 0.1}}}},
                {"C", 20, {{0, {0.5, 0.05}}, {1, {0.5, 0.05}}}}};
  s.item_feature_probabilities = {0.1, 0.3};
  s.ratings_per_user = 80;
  s.list_length = 20;
  s.bias_penalty = 3.0;
  s.seed = seed;
  return s;
}

bool any_sensitive(const SyntheticItems& items, std::size_t i, std::size_t ks) {
  for (std::size_t f = 0; f < ks; ++f) {
    if (items.is_sensitive(i, f)) return true;
  }
  return false;
}

std::size_t index_of_item(const SyntheticItems& items, const std::string& id) {
  return static_cast<std::size_t>(std::find(items.ids.begin(), items.ids.end(), id) - items.ids.begin());
}

TEST(GenerateUsers, HighPropensityMean) {
  GeneratorSpec s = small_spec();
  s.n_users = 500;
  s.segments = {{"A", 500, {{1, {0.9, 0.1}}}}};
  Rng rng(42);
  const auto users = generate_users(s, rng);
  double mean = 0.0;
  for (std::size_t u = 0; u < 500; ++u) mean += users.propensity(u, 1) / 500.0;
  EXPECT_NEAR(mean, 0.9, 0.02);
}

TEST(GenerateUsers, ZeroSigmaCopiesPropensity) {
  GeneratorSpec s = small_spec();
  s.factor_sigma = 0.0;
  Rng rng(3);
  const auto users = generate_users(s, rng);
  EXPECT_EQ(users.factors, users.propensity);
}

TEST(GenerateUsers, CompatibilityClampedPropensity) {
  GeneratorSpec s = small_spec();
  s.segments = {{"wide", 60, {{0, {0.5, 2.0}}}}};
  Rng rng(3);
  const auto users = generate_users(s, rng);
  for (std::size_t u = 0; u < s.n_users; ++u) {
    for (std::size_t f = 0; f < s.k_sensitive; ++f) {
      const double c = users.compatibility(u, f);
      EXPECT_GE(c, 0.0);
      EXPECT_LE(c, 1.0);
      EXPECT_EQ(c, std::clamp(users.propensity(u, f), 0.0, 1.0));
    }
  }
}

TEST(GenerateItems, PrevalenceWithinBinomialBounds) {
  GeneratorSpec s = small_spec();
  s.n_items = 1000;
  s.item_feature_probabilities = {0.1, 0.3};
  Rng rng(11);
  const auto items = generate_items(s, rng);
  for (std::size_t f = 0; f < 2; ++f) {
    const double p = s.item_feature_probabilities[f];
    std::size_t count = 0;
    for (std::size_t i = 0; i < s.n_items; ++i) count += items.is_sensitive(i, f);
    const double sd = std::sqrt(1000.0 * p * (1 - p));
    EXPECT_NEAR(static_cast<double>(count), 1000.0 * p, 3 * sd) << "factor " << f;
  }
  std::size_t first = 0;
  for (std::size_t i = 0; i < s.n_items; ++i) first += items.is_sensitive(i, 0);
  EXPECT_NEAR(static_cast<double>(first), 100.0, 30.0);
}

TEST(GenerateItems, DegenerateProbabilities) {
  GeneratorSpec s = small_spec();
  s.item_feature_probabilities = {0.0, 1.0};
  Rng rng(5);
  const auto items = generate_items(s, rng);
  for (std::size_t i = 0; i < s.n_items; ++i) {
    EXPECT_FALSE(items.is_sensitive(i, 0));
    EXPECT_TRUE(items.is_sensitive(i, 1));
  }
}

TEST(RecLists, ShapeInvariants) {
  const auto d = generate(small_spec());
  ASSERT_EQ(d.rec_lists.size(), d.users.ids.size());
  for (const auto& l : d.rec_lists) {
    ASSERT_EQ(l.size(), d.spec.list_length);
    std::set<std::string> seen;
    for (std::size_t i = 0; i < l.size(); ++i) {
      EXPECT_TRUE(seen.insert(l[i].item_id).second);
      if (i > 0) EXPECT_LE(l[i].score, l[i - 1].score);
    }
  }
}

TEST(RecLists, HugePenaltyExcludesProtected) {
  GeneratorSpec s = small_spec();
  s.bias_penalty = 1000.0;
  const auto d = generate(s);
  for (const auto& l : d.rec_lists) {
    for (const auto& e : l) EXPECT_FALSE(any_sensitive(d.items, index_of_item(d.items, e.item_id), 2));
  }
}

double mean_protected_position(const SyntheticDataset& d) {
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& l : d.rec_lists) {
    for (std::size_t p = 0; p < l.size(); ++p) {
      if (any_sensitive(d.items, index_of_item(d.items, l[p].item_id), d.spec.k_sensitive)) {
        total += static_cast<double>(p);
        ++count;
      }
    }
  }
  return count == 0 ? static_cast<double>(d.spec.list_length) : total / static_cast<double>(count);
}

double protected_share(const SyntheticDataset& d, std::size_t f) {
  double hits = 0.0;
  double total = 0.0;
  for (const auto& l : d.rec_lists) {
    for (const auto& e : l) {
      hits += d.items.is_sensitive(index_of_item(d.items, e.item_id), f);
      total += 1.0;
    }
  }
  return hits / total;
}

TEST(RecLists, PenaltyPushesProtectedDown) {
  GeneratorSpec biased = small_spec(9);
  biased.bias_penalty = 0.5;
  GeneratorSpec control = biased;
  control.bias_penalty = 0.0;
  const auto b = generate(biased);
  const auto c = generate(control);
  EXPECT_EQ(b.items.propensity, c.items.propensity);
  for (std::size_t f = 0; f < 2; ++f) EXPECT_LT(protected_share(b, f), protected_share(c, f));
  // Positions compared over every rated item, so both runs rank the same set.
  biased.list_length = control.list_length = biased.ratings_per_user;
  EXPECT_GT(mean_protected_position(generate(biased)), mean_protected_position(generate(control)));
}

TEST(RecLists, ZeroPenaltyRunsAreIdentical) {
  GeneratorSpec s = small_spec(4);
  s.bias_penalty = 0.0;
  const auto a = generate(s);
  const auto b = generate(s);
  EXPECT_EQ(a.rec_lists, b.rec_lists);
}

TEST(RecLists, StackedPenaltyCountsAttributes) {
  GeneratorSpec s = small_spec(2);
  s.item_feature_probabilities = {1.0, 1.0};
  s.ratings_per_user = s.list_length = 200;
  s.n_users = 3;
  s.segments.clear();
  GeneratorSpec stacked = s;
  stacked.stack_penalty = true;
  const auto once = generate(s);
  const auto twice = generate(stacked);
  for (std::size_t u = 0; u < 3; ++u) {
    for (std::size_t i = 0; i < once.rec_lists[u].size(); ++i) {
      EXPECT_NEAR(once.rec_lists[u][i].score - twice.rec_lists[u][i].score, s.bias_penalty, 1e-9);
    }
  }
}

TEST(RecLists, TooManyRatingsIsAnError) {
  GeneratorSpec s = small_spec();
  Rng rng(1);
  const auto users = generate_users(s, rng);
  const auto items = generate_items(s, rng);
  GeneratorSpec bigger = s;
  bigger.ratings_per_user = s.n_items + 1;
  EXPECT_THROW(generate_rec_lists(users, items, bigger, rng), Error);
}

TEST(Arrivals, ThreeSegments) {
  const auto spec = GeneratorSpec::three_segment(1);
  const auto order = arrival_order(spec);
  ASSERT_EQ(order.size(), 1500u);
  Rng rng(1);
  const auto users = generate_users(spec, rng);
  for (std::size_t p = 0; p < order.size(); ++p) {
    const auto u = static_cast<std::size_t>(std::find(users.ids.begin(), users.ids.end(), order[p]) - users.ids.begin());
    EXPECT_EQ(users.segment[u], p / 500);
  }
}

TEST(Arrivals, SingleAndEmptySegments) {
  GeneratorSpec s = small_spec();
  s.segments = {{"all", 60, {}}};
  const auto single = arrival_order(s);
  for (std::size_t u = 0; u < 60; ++u) EXPECT_EQ(single[u], user_id(s, u));
  s.segments = {{"none", 0, {}}, {"all", 60, {}}};
  EXPECT_EQ(arrival_order(s), single);
  s.segments = {{"short", 10, {}}};
  EXPECT_THROW(arrival_order(s), Error);
}

TEST(Generate, Deterministic) {
  const auto a = generate(small_spec(77));
  const auto b = generate(small_spec(77));
  EXPECT_EQ(a.users.factors, b.users.factors);
  EXPECT_EQ(a.items.factors, b.items.factors);
  EXPECT_EQ(a.rec_lists, b.rec_lists);
  const auto c = generate(small_spec(78));
  EXPECT_NE(a.users.factors, c.users.factors);
}

TEST(Spec, Validation) {
  GeneratorSpec s = small_spec();
  s.k_sensitive = 7;
  EXPECT_THROW(s.validate(), Error);
  s = small_spec();
  s.list_length = s.ratings_per_user + 1;
  EXPECT_THROW(s.validate(), Error);
  s = small_spec();
  s.item_feature_probabilities = {1.5, 0.1};
  EXPECT_THROW(s.validate(), Error);
}

TEST(Spec, JsonRoundTrip) {
  const auto spec = GeneratorSpec::three_segment(5);
  const auto back = GeneratorSpec::from_json(nlohmann::json::parse(spec.to_json().dump()));
  EXPECT_EQ(back.to_json(), spec.to_json());
}

TEST(WriteDataset, WritesFiveFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "scruf_write_dataset";
  std::filesystem::remove_all(dir);
  const auto d = generate(small_spec());
  write_dataset(d, dir);
  for (const char* f : {"items.tsv", "reclists.tsv", "compat.tsv", "arrivals.txt", "manifest.json"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  }
  const auto manifest = nlohmann::json::parse(read_file(dir / "manifest.json"));
  EXPECT_EQ(manifest["seed"], 1);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace scruf::synthetic
