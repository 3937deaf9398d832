#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "scruf/agents.hpp"
#include "scruf/model.hpp"

namespace scruf {

enum class Relevance {
  kGraded,  // reference scores (negatives count as 0)
  kBinary,  // 1 for any item present in the reference
};

Relevance parse_relevance(const std::string& name);
std::string to_string(Relevance relevance);

// nDCG@k of `output` against `reference`. When the reference has no positive
// relevance at all, every ranking is ideal and the result is 1.
double ndcg_at_k(const ScoredList& output, const ScoredList& reference, std::size_t k,
                 Relevance relevance = Relevance::kGraded);

// Mean protected share over every output list in the run, divided by the
// agent's target. Not clamped.
double global_fairness(std::span<const StepRecord> run, const AgentSpec& agent, const Catalog& catalog);

// (sum_i sqrt(m_i))^2 / |F|^2
double l_half(std::span<const double> fairness_values);

// Cumulative sum of (1 - m_t).
std::vector<double> fairness_regret(std::span<const double> in_loop_fairness);

struct RunMetrics {
  double ndcg = 0.0;
  std::vector<std::string> agents;
  std::vector<double> global_fairness;             // per agent
  double l_half = 0.0;
  double mean_fairness = 0.0;
  std::vector<std::vector<double>> regret_series;  // per agent, per step

  double final_regret(std::size_t agent) const {
    const auto& s = regret_series.at(agent);
    return s.empty() ? 0.0 : s.back();
  }
};

}  // namespace scruf
