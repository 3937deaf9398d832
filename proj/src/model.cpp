#include "scruf/model.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace scruf {

namespace {

constexpr double kSumTolerance = 1e-9;

void check_unique(const std::vector<ScoredItem>& entries) {
  std::unordered_set<std::string> seen;
  for (const auto& e : entries) {
    if (!seen.insert(e.item_id).second) {
      throw Error("duplicate item in scored list: " + e.item_id);
    }
  }
}

}  // namespace

void Catalog::add(Item item) {
  if (contains(item.id)) {
    throw Error("duplicate item id in catalog: " + item.id);
  }
  index_.emplace(item.id, items_.size());
  items_.push_back(std::move(item));
}

const Item& Catalog::at(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) {
    throw Error("item not in catalog: " + id);
  }
  return items_[it->second];
}

Item& Catalog::at(const std::string& id) {
  auto it = index_.find(id);
  if (it == index_.end()) {
    throw Error("item not in catalog: " + id);
  }
  return items_[it->second];
}

void UserProfile::set_compatibility(const std::string& agent, double value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw Error("compatibility for user " + id + " / agent " + agent +
                " outside [0,1]: " + std::to_string(value));
  }
  compatibility[agent] = value;
}

ScoredList ScoredList::sorted(std::vector<ScoredItem> entries) {
  check_unique(entries);
  std::sort(entries.begin(), entries.end(), [](const ScoredItem& a, const ScoredItem& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.item_id < b.item_id;
  });
  return ScoredList(std::move(entries));
}

ScoredList ScoredList::from_ranked(std::vector<ScoredItem> entries) {
  check_unique(entries);
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].score > entries[i - 1].score) {
      throw Error("scored list not in descending score order at item " + entries[i].item_id);
    }
  }
  return ScoredList(std::move(entries));
}

std::vector<std::string> ScoredList::item_ids() const {
  std::vector<std::string> ids;
  ids.reserve(entries_.size());
  for (const auto& e : entries_) ids.push_back(e.item_id);
  return ids;
}

ScoredList ScoredList::top(std::size_t k) const {
  if (k >= entries_.size()) return *this;
  return ScoredList(std::vector<ScoredItem>(entries_.begin(), entries_.begin() + k));
}

AgentAllocation::AgentAllocation(std::vector<AgentWeight> weights) : weights_(std::move(weights)) {
  double sum = 0.0;
  for (const auto& w : weights_) {
    if (!(w.weight >= 0.0 && w.weight <= 1.0 + kSumTolerance)) {
      throw Error("allocation weight for " + w.agent + " outside [0,1]");
    }
    sum += w.weight;
  }
  if (sum != 0.0 && std::abs(sum - 1.0) > kSumTolerance) {
    throw Error("allocation weights sum to " + std::to_string(sum) + ", expected 0 or 1");
  }
}

AgentAllocation AgentAllocation::none(const std::vector<std::string>& agents) {
  std::vector<AgentWeight> w;
  w.reserve(agents.size());
  for (const auto& a : agents) w.push_back({a, 0.0});
  return AgentAllocation(std::move(w));
}

AgentAllocation AgentAllocation::one_hot(const std::vector<std::string>& agents, std::size_t chosen) {
  std::vector<AgentWeight> w;
  w.reserve(agents.size());
  for (std::size_t i = 0; i < agents.size(); ++i) w.push_back({agents[i], i == chosen ? 1.0 : 0.0});
  return AgentAllocation(std::move(w));
}

double AgentAllocation::weight(const std::string& agent) const {
  for (const auto& w : weights_) {
    if (w.agent == agent) return w.weight;
  }
  return 0.0;
}

bool AgentAllocation::is_empty() const {
  return std::all_of(weights_.begin(), weights_.end(), [](const AgentWeight& w) { return w.weight == 0.0; });
}

double AgentAllocation::total() const {
  double sum = 0.0;
  for (const auto& w : weights_) sum += w.weight;
  return sum;
}

History::History(std::size_t window_size) : window_size_(window_size) {
  if (window_size_ == 0) throw Error("window size must be positive");
}

void History::append(StepRecord record) {
  if (record.time != records_.size()) {
    throw Error("out-of-order step: expected t=" + std::to_string(records_.size()) +
                ", got t=" + std::to_string(record.time));
  }
  records_.push_back(std::move(record));
}

std::span<const StepRecord> History::window() const {
  std::span<const StepRecord> all(records_);
  const std::size_t n = std::min(window_size_, all.size());
  return all.subspan(all.size() - n);
}

}  // namespace scruf
