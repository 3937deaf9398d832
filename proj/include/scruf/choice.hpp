#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "scruf/model.hpp"

namespace scruf {

// Voter name used for the base recommender's ballot.
inline const std::string kRecommenderVoter = "recommender";

struct Ballot {
  std::string voter;
  double weight = 0.0;
  std::vector<std::string> ranking;  // best first
};

struct ChoiceConfig {
  double lambda = 1.0;                  // recommender weight
  std::map<std::string, double> delta;  // per-agent score increment, default 1
  std::size_t output_size = 10;

  double delta_for(const std::string& agent) const;
};

enum class ChoiceMechanism { kRescore, kBorda, kCopeland, kRankedPairs };

ChoiceMechanism parse_choice_mechanism(const std::string& name);
std::string to_string(ChoiceMechanism mechanism);

using AgentLists = std::map<std::string, ScoredList>;

// score(v) = lambda * r(v) + (1 - lambda) * sum_i beta_i * delta_i * s_i(v).
// Equal scores keep base-list order.
ScoredList rescore(const ScoredList& base, const AgentAllocation& beta, const AgentLists& agent_lists,
                   const ChoiceConfig& cfg);

// Recommender ballot weighted lambda, one ballot per allocated agent weighted
// (1 - lambda) * beta_i. Zero-weight ballots are dropped.
std::vector<Ballot> make_ballots(const ScoredList& base, const AgentAllocation& beta,
                                 const AgentLists& agent_lists, double lambda);

// Weighted pairwise majority margins. Candidates are indexed in the order of
// the first ballot's ranking.
class MarginTable {
 public:
  MarginTable() = default;
  explicit MarginTable(std::vector<std::string> candidates);

  std::size_t size() const { return candidates_.size(); }
  const std::vector<std::string>& candidates() const { return candidates_; }
  std::size_t index_of(const std::string& item) const;

  double at(std::size_t i, std::size_t j) const { return margins_[i * candidates_.size() + j]; }
  double& at(std::size_t i, std::size_t j) { return margins_[i * candidates_.size() + j]; }
  double operator()(const std::string& a, const std::string& b) const {
    return at(index_of(a), index_of(b));
  }
  // Margins below this magnitude count as ties.
  double tolerance() const { return tolerance_; }
  void set_tolerance(double t) { tolerance_ = t; }

 private:
  std::vector<std::string> candidates_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<double> margins_;
  double tolerance_ = 1e-12;
};

MarginTable pairwise_margins(std::span<const Ballot> ballots);

ScoredList borda(std::span<const Ballot> ballots, std::size_t k, const ScoredList& base);
ScoredList copeland(std::span<const Ballot> ballots, std::size_t k, const ScoredList& base);

struct LockedPair {
  std::string winner;
  std::string loser;
  double margin = 0.0;
};

struct RankedPairsOutcome {
  std::vector<std::string> order;  // full ranking over all candidates
  std::vector<LockedPair> locked;  // in lock order
  std::vector<LockedPair> skipped;
};

RankedPairsOutcome ranked_pairs_outcome(std::span<const Ballot> ballots, const ScoredList& base);
ScoredList ranked_pairs(std::span<const Ballot> ballots, std::size_t k, const ScoredList& base);

// Runs the configured mechanism and trims to cfg.output_size. An empty
// allocation passes the base list through for the ballot-based mechanisms.
ScoredList choose(ChoiceMechanism mechanism, const ScoredList& base, const AgentAllocation& beta,
                  const AgentLists& agent_lists, const ChoiceConfig& cfg);

}  // namespace scruf
