#pragma once

#include <set>
#include <span>
#include <string>

#include "scruf/model.hpp"

namespace scruf {

enum class MetricKind { kProportionalExposure, kListPresence };

MetricKind parse_metric_kind(const std::string& name);
std::string to_string(MetricKind kind);

// Items whose `feature` takes one of `values` form the protected group.
struct ProtectedPredicate {
  std::string feature;
  std::set<std::string> values;

  bool matches(const Item& item) const;
};

struct AgentSpec {
  std::string name;
  ProtectedPredicate predicate;
  MetricKind metric = MetricKind::kProportionalExposure;
  double target = 1.0;  // exposure target, in (0,1]

  void validate() const;
};

// Sets Item::sensitive_flags for every agent on every catalog item.
void apply_agents(Catalog& catalog, std::span<const AgentSpec> agents);

// Mean share of protected items per output list, scaled by the target and
// clamped to 1. An empty window scores 0.
double fairness_proportional(const AgentSpec& agent, std::span<const StepRecord> window,
                             const Catalog& catalog);

// Share of output lists holding at least one protected item. Empty window scores 0.
double fairness_list_presence(const AgentSpec& agent, std::span<const StepRecord> window,
                              const Catalog& catalog);

// Dispatches on agent.metric.
double evaluate_fairness(const AgentSpec& agent, std::span<const StepRecord> window,
                         const Catalog& catalog);

// Binary entropy (bits) of the protected share of a user's past items.
double compatibility_entropy(std::span<const Item> profile_items, const AgentSpec& agent);

// Binary preference over the items of `base_list`: protected items score 1,
// the rest 0. Equal scores keep their order in `base_list`.
ScoredList agent_preference(const AgentSpec& agent, const ScoredList& base_list,
                            const Catalog& catalog);

}  // namespace scruf
