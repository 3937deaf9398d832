#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "scruf/allocation.hpp"
#include "scruf/model.hpp"

namespace scruf::synthetic {

struct Normal {
  double mean = 0.0;
  double stddev = 1.0;
};

struct PropensityOverride {
  std::size_t factor = 0;
  Normal dist;
};

// A block of users arriving together, with propensity distributions that
// replace the default for the listed factors.
struct SegmentSpec {
  std::string name;
  std::size_t size = 0;
  std::vector<PropensityOverride> propensities;

  Normal distribution_for(std::size_t factor, const Normal& fallback) const;
};

struct GeneratorSpec {
  std::size_t n_users = 0;
  std::size_t n_items = 0;
  std::size_t k_factors = 0;
  std::size_t k_sensitive = 0;
  Normal default_user_propensity{0.5, 0.25};
  std::vector<SegmentSpec> segments;
  std::vector<double> item_feature_probabilities;  // one per sensitive factor
  double nonsensitive_item_probability = 0.5;
  double factor_sigma = 1.0;
  std::size_t ratings_per_user = 0;  // m
  std::size_t list_length = 0;       // m'
  double bias_penalty = 0.0;         // gamma
  bool stack_penalty = false;        // apply gamma once per sensitive attribute
  std::vector<std::string> agent_names;  // one per sensitive factor
  std::uint64_t seed = 0;

  void validate() const;
  std::string agent_name(std::size_t factor) const;
  static std::string feature_name(std::size_t factor);

  static GeneratorSpec from_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;

  // 1500 users in segments A/B/C of 500, 1000 items, k_s = 2 with item
  // prevalence 0.1 / 0.3, m = 200, m' = 50, gamma = 3.
  static GeneratorSpec three_segment(std::uint64_t seed);
};

// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  bool operator==(const Matrix&) const = default;
};

struct SyntheticUsers {
  std::vector<std::string> ids;
  std::vector<std::size_t> segment;
  Matrix propensity;     // n_users x k
  Matrix factors;        // n_users x k
  Matrix compatibility;  // n_users x k_s, clamped propensities
};

struct SyntheticItems {
  std::vector<std::string> ids;
  Matrix propensity;  // n_items x k, binary
  Matrix factors;     // n_items x k

  bool is_sensitive(std::size_t item, std::size_t factor) const { return propensity(item, factor) != 0.0; }
};

std::string user_id(const GeneratorSpec& spec, std::size_t index);
std::string item_id(const GeneratorSpec& spec, std::size_t index);

SyntheticUsers generate_users(const GeneratorSpec& spec, Rng& rng);
SyntheticItems generate_items(const GeneratorSpec& spec, Rng& rng);
std::vector<ScoredList> generate_rec_lists(const SyntheticUsers& users, const SyntheticItems& items,
                                           const GeneratorSpec& spec, Rng& rng);
std::vector<std::string> arrival_order(const GeneratorSpec& spec);

struct SyntheticDataset {
  GeneratorSpec spec;
  SyntheticUsers users;
  SyntheticItems items;
  std::vector<ScoredList> rec_lists;  // indexed like users
  std::vector<std::string> arrivals;
};

// Users, then items, then lists, all from one stream seeded with spec.seed.
SyntheticDataset generate(const GeneratorSpec& spec);

// items.tsv, reclists.tsv, compat.tsv, arrivals.txt and manifest.json.
void write_dataset(const SyntheticDataset& data, const std::filesystem::path& dir);

}  // namespace scruf::synthetic
