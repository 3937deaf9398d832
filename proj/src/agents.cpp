#include "scruf/agents.hpp"

#include <algorithm>
#include <cmath>

namespace scruf {

MetricKind parse_metric_kind(const std::string& name) {
  if (name == "proportional_exposure") return MetricKind::kProportionalExposure;
  if (name == "list_presence") return MetricKind::kListPresence;
  throw Error("unknown fairness metric: " + name);
}

std::string to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::kProportionalExposure:
      return "proportional_exposure";
    case MetricKind::kListPresence:
      return "list_presence";
  }
  return "?";
}

bool ProtectedPredicate::matches(const Item& item) const {
  auto it = item.features.find(feature);
  return it != item.features.end() && values.count(it->second) != 0;
}

void AgentSpec::validate() const {
  if (name.empty()) throw Error("agent without a name");
  if (!(target > 0.0 && target <= 1.0)) {
    throw Error("agent " + name + ": target must lie in (0,1]");
  }
  if (predicate.feature.empty()) throw Error("agent " + name + ": protected feature not set");
}

void apply_agents(Catalog& catalog, std::span<const AgentSpec> agents) {
  for (const auto& agent : agents) {
    agent.validate();
    bool known = false;
    for (const auto& item : catalog.items()) {
      if (item.features.count(agent.predicate.feature)) {
        known = true;
        break;
      }
    }
    if (!known && catalog.size() > 0) {
      throw Error("agent " + agent.name + " references feature '" + agent.predicate.feature +
                  "' that no catalog item has");
    }
  }
  for (const auto& item : catalog.items()) {
    Item& mutable_item = catalog.at(item.id);
    for (const auto& agent : agents) {
      mutable_item.sensitive_flags[agent.name] = agent.predicate.matches(item);
    }
  }
}

double fairness_proportional(const AgentSpec& agent, std::span<const StepRecord> window,
                             const Catalog& catalog) {
  if (window.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& rec : window) {
    const auto& out = rec.output_list;
    if (out.empty()) continue;
    std::size_t hits = 0;
    for (const auto& e : out) {
      if (catalog.is_protected(e.item_id, agent.name)) ++hits;
    }
    sum += static_cast<double>(hits) / static_cast<double>(out.size());
  }
  const double mean = sum / static_cast<double>(window.size());
  return std::min(1.0, mean / agent.target);
}

double fairness_list_presence(const AgentSpec& agent, std::span<const StepRecord> window,
                              const Catalog& catalog) {
  if (window.empty()) return 0.0;
  std::size_t lists = 0;
  for (const auto& rec : window) {
    const auto& out = rec.output_list;
    if (std::any_of(out.begin(), out.end(),
                    [&](const ScoredItem& e) { return catalog.is_protected(e.item_id, agent.name); })) {
      ++lists;
    }
  }
  return static_cast<double>(lists) / static_cast<double>(window.size());
}

double evaluate_fairness(const AgentSpec& agent, std::span<const StepRecord> window,
                         const Catalog& catalog) {
  switch (agent.metric) {
    case MetricKind::kProportionalExposure:
      return fairness_proportional(agent, window, catalog);
    case MetricKind::kListPresence:
      return fairness_list_presence(agent, window, catalog);
  }
  return 0.0;
}

double compatibility_entropy(std::span<const Item> profile_items, const AgentSpec& agent) {
  if (profile_items.empty()) {
    throw Error("cannot compute compatibility for agent " + agent.name + " from an empty profile");
  }
  const auto hits = std::count_if(profile_items.begin(), profile_items.end(),
                                  [&](const Item& item) { return agent.predicate.matches(item); });
  const double q = static_cast<double>(hits) / static_cast<double>(profile_items.size());
  auto term = [](double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; };
  return term(q) + term(1.0 - q);
}

ScoredList agent_preference(const AgentSpec& agent, const ScoredList& base_list,
                            const Catalog& catalog) {
  if (base_list.empty()) throw Error("agent " + agent.name + ": empty base list");
  std::vector<ScoredItem> preferred;
  std::vector<ScoredItem> rest;
  for (const auto& e : base_list) {
    if (!catalog.contains(e.item_id)) {
      throw Error("agent " + agent.name + ": item not in catalog: " + e.item_id);
    }
    if (catalog.is_protected(e.item_id, agent.name)) {
      preferred.push_back({e.item_id, 1.0});
    } else {
      rest.push_back({e.item_id, 0.0});
    }
  }
  preferred.insert(preferred.end(), rest.begin(), rest.end());
  return ScoredList::from_ranked(std::move(preferred));
}

}  // namespace scruf
