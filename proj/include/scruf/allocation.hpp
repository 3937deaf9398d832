#pragma once

#include <random>
#include <string>
#include <vector>

#include "scruf/model.hpp"

namespace scruf {

using Rng = std::mt19937_64;

// What one agent reports for the current recommendation opportunity.
struct AgentEvaluation {
  std::string agent;
  double fairness = 0.0;       // m_i in [0,1]
  double compatibility = 0.0;  // c_i in [0,1]
};

// Evaluations in agent registration order.
struct AllocationInput {
  std::vector<AgentEvaluation> agents;

  std::vector<std::string> names() const;
};

enum class AllocationMechanism { kNone, kLeastFair, kLottery, kWeighted };

AllocationMechanism parse_allocation_mechanism(const std::string& name);
std::string to_string(AllocationMechanism mechanism);

// One-hot on the least fair agent (first registered wins ties). Returns the
// empty allocation when every agent is exactly fair or there are no agents.
AgentAllocation allocate_least_fair(const AllocationInput& input);

// Draws a single agent with probability proportional to (1 - m_i) * c_i.
// Consumes exactly one value from `rng` unless every product is zero.
AgentAllocation allocate_lottery(const AllocationInput& input, Rng& rng);

// beta_i proportional to (1 - m_i) * c_i.
AgentAllocation allocate_weighted(const AllocationInput& input);

AgentAllocation allocate(AllocationMechanism mechanism, const AllocationInput& input, Rng& rng);

// Uniform double in [0,1) built from the top 53 bits of a single draw.
double uniform_unit(Rng& rng);

}  // namespace scruf
