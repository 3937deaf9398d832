#include "scruf/allocation.hpp"

namespace scruf {

namespace {

std::vector<double> unfairness_products(const AllocationInput& input) {
  std::vector<double> products;
  products.reserve(input.agents.size());
  for (const auto& a : input.agents) {
    products.push_back((1.0 - a.fairness) * a.compatibility);
  }
  return products;
}

}  // namespace

std::vector<std::string> AllocationInput::names() const {
  std::vector<std::string> out;
  out.reserve(agents.size());
  for (const auto& a : agents) out.push_back(a.agent);
  return out;
}

AllocationMechanism parse_allocation_mechanism(const std::string& name) {
  if (name == "none") return AllocationMechanism::kNone;
  if (name == "least_fair") return AllocationMechanism::kLeastFair;
  if (name == "lottery") return AllocationMechanism::kLottery;
  if (name == "weighted") return AllocationMechanism::kWeighted;
  throw Error("unknown allocation mechanism: " + name);
}

std::string to_string(AllocationMechanism mechanism) {
  switch (mechanism) {
    case AllocationMechanism::kNone:
      return "none";
    case AllocationMechanism::kLeastFair:
      return "least_fair";
    case AllocationMechanism::kLottery:
      return "lottery";
    case AllocationMechanism::kWeighted:
      return "weighted";
  }
  return "?";
}

double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

AgentAllocation allocate_least_fair(const AllocationInput& input) {
  const auto names = input.names();
  if (input.agents.empty()) return AgentAllocation::none(names);
  std::size_t best = 0;
  bool all_fair = true;
  for (std::size_t i = 0; i < input.agents.size(); ++i) {
    if (input.agents[i].fairness != 1.0) all_fair = false;
    if (input.agents[i].fairness < input.agents[best].fairness) best = i;
  }
  if (all_fair) return AgentAllocation::none(names);
  return AgentAllocation::one_hot(names, best);
}

AgentAllocation allocate_lottery(const AllocationInput& input, Rng& rng) {
  const auto names = input.names();
  const auto products = unfairness_products(input);
  double total = 0.0;
  for (double p : products) total += p;
  if (!(total > 0.0)) return AgentAllocation::none(names);

  const double draw = uniform_unit(rng) * total;
  double cumulative = 0.0;
  std::size_t chosen = products.size();
  for (std::size_t i = 0; i < products.size(); ++i) {
    if (products[i] <= 0.0) continue;
    cumulative += products[i];
    chosen = i;
    if (draw < cumulative) break;
  }
  return AgentAllocation::one_hot(names, chosen);
}

AgentAllocation allocate_weighted(const AllocationInput& input) {
  const auto products = unfairness_products(input);
  double total = 0.0;
  for (double p : products) total += p;
  if (!(total > 0.0)) return AgentAllocation::none(input.names());

  std::vector<AgentWeight> weights;
  weights.reserve(products.size());
  for (std::size_t i = 0; i < products.size(); ++i) {
    weights.push_back({input.agents[i].agent, products[i] / total});
  }
  return AgentAllocation(std::move(weights));
}

AgentAllocation allocate(AllocationMechanism mechanism, const AllocationInput& input, Rng& rng) {
  switch (mechanism) {
    case AllocationMechanism::kNone:
      return AgentAllocation::none(input.names());
    case AllocationMechanism::kLeastFair:
      return allocate_least_fair(input);
    case AllocationMechanism::kLottery:
      return allocate_lottery(input, rng);
    case AllocationMechanism::kWeighted:
      return allocate_weighted(input);
  }
  throw Error("unhandled allocation mechanism");
}

}  // namespace scruf
