#include "scruf/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace scruf {

Relevance parse_relevance(const std::string& name) {
  if (name == "graded") return Relevance::kGraded;
  if (name == "binary") return Relevance::kBinary;
  throw Error("unknown relevance mode: " + name);
}

std::string to_string(Relevance relevance) {
  return relevance == Relevance::kGraded ? "graded" : "binary";
}

double ndcg_at_k(const ScoredList& output, const ScoredList& reference, std::size_t k, Relevance relevance) {
  if (k == 0) throw Error("nDCG cutoff must be positive");
  if (reference.empty()) throw Error("nDCG reference list is empty");

  std::unordered_map<std::string, double> rel;
  rel.reserve(reference.size());
  for (const auto& e : reference) {
    rel[e.item_id] = relevance == Relevance::kBinary ? 1.0 : std::max(0.0, e.score);
  }

  auto discount = [](std::size_t rank) { return 1.0 / std::log2(static_cast<double>(rank) + 2.0); };

  double dcg = 0.0;
  for (std::size_t p = 0; p < std::min(k, output.size()); ++p) {
    auto it = rel.find(output[p].item_id);
    if (it != rel.end()) dcg += it->second * discount(p);
  }

  std::vector<double> ideal;
  ideal.reserve(reference.size());
  for (const auto& e : reference) ideal.push_back(rel[e.item_id]);
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  double idcg = 0.0;
  for (std::size_t p = 0; p < std::min(k, ideal.size()); ++p) idcg += ideal[p] * discount(p);

  if (idcg <= 0.0) return 1.0;
  return dcg / idcg;
}

double global_fairness(std::span<const StepRecord> run, const AgentSpec& agent, const Catalog& catalog) {
  if (run.empty()) throw Error("global fairness of an empty run");
  double sum = 0.0;
  for (const auto& rec : run) {
    const auto& out = rec.output_list;
    if (out.empty()) continue;
    std::size_t hits = 0;
    for (const auto& e : out) {
      if (catalog.is_protected(e.item_id, agent.name)) ++hits;
    }
    sum += static_cast<double>(hits) / static_cast<double>(out.size());
  }
  return sum / static_cast<double>(run.size()) / agent.target;
}

double l_half(std::span<const double> fairness_values) {
  if (fairness_values.empty()) throw Error("L1/2 of no values");
  double root_sum = 0.0;
  for (double m : fairness_values) {
    if (m < 0.0) throw Error("L1/2 input must be non-negative");
    root_sum += std::sqrt(m);
  }
  const double n = static_cast<double>(fairness_values.size());
  return root_sum * root_sum / (n * n);
}

std::vector<double> fairness_regret(std::span<const double> in_loop_fairness) {
  std::vector<double> series;
  series.reserve(in_loop_fairness.size());
  double total = 0.0;
  for (double m : in_loop_fairness) {
    total += 1.0 - m;
    series.push_back(total);
  }
  return series;
}

}  // namespace scruf
