#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace scruf {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Item {
  std::string id;
  std::map<std::string, std::string> features;
  // agent name -> item is protected for that agent. Absent means false.
  std::map<std::string, bool> sensitive_flags;

  bool is_protected_for(const std::string& agent) const {
    auto it = sensitive_flags.find(agent);
    return it != sensitive_flags.end() && it->second;
  }
};

// Items keyed by id, remembering insertion order.
class Catalog {
 public:
  void add(Item item);
  bool contains(const std::string& id) const { return index_.count(id) != 0; }
  const Item& at(const std::string& id) const;
  Item& at(const std::string& id);
  std::size_t size() const { return items_.size(); }
  const std::vector<Item>& items() const { return items_; }
  bool is_protected(const std::string& item_id, const std::string& agent) const {
    return at(item_id).is_protected_for(agent);
  }

 private:
  std::vector<Item> items_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct UserProfile {
  std::string id;
  std::map<std::string, std::string> attributes;
  std::map<std::string, double> compatibility;

  void set_compatibility(const std::string& agent, double value);
};

struct ScoredItem {
  std::string item_id;
  double score = 0.0;

  bool operator==(const ScoredItem&) const = default;
};

// Ranked (item, score) list. Scores never increase along the list and item
// ids are unique. Lists built with sorted() break score ties by item id;
// lists built from an existing ranking keep the given order among ties.
class ScoredList {
 public:
  ScoredList() = default;

  static ScoredList sorted(std::vector<ScoredItem> entries);
  static ScoredList from_ranked(std::vector<ScoredItem> entries);

  const std::vector<ScoredItem>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const ScoredItem& operator[](std::size_t i) const { return entries_[i]; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  std::vector<std::string> item_ids() const;
  ScoredList top(std::size_t k) const;

  bool operator==(const ScoredList&) const = default;

 private:
  explicit ScoredList(std::vector<ScoredItem> entries) : entries_(std::move(entries)) {}
  std::vector<ScoredItem> entries_;
};

struct AgentWeight {
  std::string agent;
  double weight = 0.0;

  bool operator==(const AgentWeight&) const = default;
};

// Weights over agents in registration order. Either every weight is zero
// ("no agent allocated") or they sum to one.
class AgentAllocation {
 public:
  AgentAllocation() = default;
  explicit AgentAllocation(std::vector<AgentWeight> weights);

  static AgentAllocation none(const std::vector<std::string>& agents);
  static AgentAllocation one_hot(const std::vector<std::string>& agents, std::size_t chosen);

  const std::vector<AgentWeight>& weights() const { return weights_; }
  double weight(const std::string& agent) const;
  bool is_empty() const;
  double total() const;

  bool operator==(const AgentAllocation&) const = default;

 private:
  std::vector<AgentWeight> weights_;
};

struct StepRecord {
  std::size_t time = 0;
  std::string user_id;
  ScoredList base_list;
  std::map<std::string, ScoredList> agent_lists;
  ScoredList output_list;
  AgentAllocation allocation;
};

class History {
 public:
  static constexpr std::size_t kDefaultWindow = 100;

  explicit History(std::size_t window_size = kDefaultWindow);

  void append(StepRecord record);
  std::span<const StepRecord> window() const;
  std::span<const StepRecord> records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  std::size_t window_size() const { return window_size_; }

 private:
  std::vector<StepRecord> records_;
  std::size_t window_size_;
};

}  // namespace scruf
