#include "scruf/choice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace scruf {

namespace {

// Aggregate scores are compared on a 1e-9 grid so that sums accumulated in a
// different order still tie.
long long quantize(double x) { return std::llround(x * 1e9); }

std::unordered_map<std::string, std::size_t> positions(const std::vector<std::string>& ranking) {
  std::unordered_map<std::string, std::size_t> pos;
  pos.reserve(ranking.size());
  for (std::size_t i = 0; i < ranking.size(); ++i) pos.emplace(ranking[i], i);
  return pos;
}

std::string describe_difference(const std::set<std::string>& expected, const std::set<std::string>& got) {
  std::string missing;
  std::string extra;
  for (const auto& id : expected) {
    if (!got.count(id)) missing += (missing.empty() ? "" : ",") + id;
  }
  for (const auto& id : got) {
    if (!expected.count(id)) extra += (extra.empty() ? "" : ",") + id;
  }
  return "missing [" + missing + "], unexpected [" + extra + "]";
}

std::set<std::string> id_set(const ScoredList& list) {
  std::set<std::string> s;
  for (const auto& e : list) s.insert(e.item_id);
  return s;
}

// Base-list position of every candidate in `table`; the base list must cover
// exactly the ballot candidates.
std::vector<std::size_t> base_rank_of(const MarginTable& table, const ScoredList& base) {
  std::set<std::string> cand(table.candidates().begin(), table.candidates().end());
  auto in_base = id_set(base);
  if (cand != in_base) {
    throw Error("base list does not match ballot candidates: " + describe_difference(cand, in_base));
  }
  const auto pos = positions(base.item_ids());
  std::vector<std::size_t> rank(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) rank[i] = pos.at(table.candidates()[i]);
  return rank;
}

void check_ballots(std::span<const Ballot> ballots) {
  if (ballots.empty()) throw Error("no ballots");
  const auto& first = ballots.front().ranking;
  if (first.empty()) throw Error("empty candidate set");
  std::set<std::string> cand(first.begin(), first.end());
  if (cand.size() != first.size()) throw Error("ballot of " + ballots.front().voter + " repeats a candidate");
  bool any_positive = false;
  for (const auto& b : ballots) {
    if (!(b.weight >= 0.0)) throw Error("ballot of " + b.voter + " has negative weight");
    if (b.weight > 0.0) any_positive = true;
    std::set<std::string> other(b.ranking.begin(), b.ranking.end());
    if (other.size() != b.ranking.size() || other != cand) {
      throw Error("ballot of " + b.voter + " ranks a different candidate set: " +
                  describe_difference(cand, other));
    }
  }
  if (!any_positive) throw Error("no ballot with positive weight");
}

// Orders candidates by key descending, then by base position.
ScoredList rank_candidates(const std::vector<std::string>& candidates, const std::vector<double>& key,
                           const std::vector<std::size_t>& base_rank, std::size_t k) {
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto qa = quantize(key[a]);
    const auto qb = quantize(key[b]);
    if (qa != qb) return qa > qb;
    return base_rank[a] < base_rank[b];
  });
  std::vector<ScoredItem> out;
  for (std::size_t i = 0; i < std::min(k, order.size()); ++i) {
    // Snap to the comparison grid so the list stays non-increasing.
    out.push_back({candidates[order[i]], static_cast<double>(quantize(key[order[i]])) * 1e-9});
  }
  return ScoredList::from_ranked(std::move(out));
}

}  // namespace

double ChoiceConfig::delta_for(const std::string& agent) const {
  auto it = delta.find(agent);
  return it == delta.end() ? 1.0 : it->second;
}

ChoiceMechanism parse_choice_mechanism(const std::string& name) {
  if (name == "rescore") return ChoiceMechanism::kRescore;
  if (name == "borda") return ChoiceMechanism::kBorda;
  if (name == "copeland") return ChoiceMechanism::kCopeland;
  if (name == "ranked_pairs") return ChoiceMechanism::kRankedPairs;
  throw Error("unknown choice mechanism: " + name);
}

std::string to_string(ChoiceMechanism mechanism) {
  switch (mechanism) {
    case ChoiceMechanism::kRescore:
      return "rescore";
    case ChoiceMechanism::kBorda:
      return "borda";
    case ChoiceMechanism::kCopeland:
      return "copeland";
    case ChoiceMechanism::kRankedPairs:
      return "ranked_pairs";
  }
  return "?";
}

ScoredList rescore(const ScoredList& base, const AgentAllocation& beta, const AgentLists& agent_lists,
                   const ChoiceConfig& cfg) {
  const auto base_ids = id_set(base);
  for (const auto& [agent, list] : agent_lists) {
    auto ids = id_set(list);
    if (ids != base_ids) {
      throw Error("agent list of " + agent + " does not match base candidates: " +
                  describe_difference(base_ids, ids));
    }
  }

  std::unordered_map<std::string, double> bonus;
  for (const auto& w : beta.weights()) {
    if (w.weight == 0.0) continue;
    auto it = agent_lists.find(w.agent);
    if (it == agent_lists.end()) throw Error("no preference list for allocated agent " + w.agent);
    const double scale = w.weight * cfg.delta_for(w.agent);
    for (const auto& e : it->second) bonus[e.item_id] += scale * e.score;
  }

  struct Scored {
    std::size_t base_pos;
    double score;
  };
  std::vector<Scored> scored;
  scored.reserve(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    double s = cfg.lambda * base[i].score;
    if (auto it = bonus.find(base[i].item_id); it != bonus.end()) s += (1.0 - cfg.lambda) * it->second;
    scored.push_back({i, s});
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const Scored& a, const Scored& b) { return a.score > b.score; });

  std::vector<ScoredItem> out;
  for (std::size_t i = 0; i < std::min(cfg.output_size, scored.size()); ++i) {
    out.push_back({base[scored[i].base_pos].item_id, scored[i].score});
  }
  return ScoredList::from_ranked(std::move(out));
}

std::vector<Ballot> make_ballots(const ScoredList& base, const AgentAllocation& beta,
                                 const AgentLists& agent_lists, double lambda) {
  std::vector<Ballot> ballots;
  if (lambda > 0.0) ballots.push_back({kRecommenderVoter, lambda, base.item_ids()});
  for (const auto& w : beta.weights()) {
    const double weight = (1.0 - lambda) * w.weight;
    if (weight <= 0.0) continue;
    auto it = agent_lists.find(w.agent);
    if (it == agent_lists.end()) throw Error("no preference list for allocated agent " + w.agent);
    ballots.push_back({w.agent, weight, it->second.item_ids()});
  }
  return ballots;
}

MarginTable::MarginTable(std::vector<std::string> candidates)
    : candidates_(std::move(candidates)),
      index_(positions(candidates_)),
      margins_(candidates_.size() * candidates_.size(), 0.0) {}

std::size_t MarginTable::index_of(const std::string& item) const {
  auto it = index_.find(item);
  if (it == index_.end()) throw Error("not a candidate: " + item);
  return it->second;
}

MarginTable pairwise_margins(std::span<const Ballot> ballots) {
  check_ballots(ballots);
  MarginTable table(ballots.front().ranking);
  const std::size_t n = table.size();
  double total_weight = 0.0;
  for (const auto& b : ballots) {
    total_weight += b.weight;
    std::vector<std::size_t> pos(n);
    for (std::size_t p = 0; p < n; ++p) pos[table.index_of(b.ranking[p])] = p;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double signed_w = pos[i] < pos[j] ? b.weight : -b.weight;
        table.at(i, j) += signed_w;
        table.at(j, i) -= signed_w;
      }
    }
  }
  table.set_tolerance(1e-12 * std::max(1.0, total_weight));
  return table;
}

ScoredList borda(std::span<const Ballot> ballots, std::size_t k, const ScoredList& base) {
  check_ballots(ballots);
  const auto& candidates = ballots.front().ranking;
  const auto index = positions(candidates);
  const std::size_t n = candidates.size();
  std::vector<double> total(n, 0.0);
  for (const auto& b : ballots) {
    for (std::size_t p = 0; p < n; ++p) {
      total[index.at(b.ranking[p])] += b.weight * static_cast<double>(n - 1 - p);
    }
  }
  MarginTable shape(candidates);
  return rank_candidates(candidates, total, base_rank_of(shape, base), k);
}

ScoredList copeland(std::span<const Ballot> ballots, std::size_t k, const ScoredList& base) {
  const auto table = pairwise_margins(ballots);
  const std::size_t n = table.size();
  std::vector<double> score(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (table.at(i, j) > table.tolerance()) score[i] += 1.0;
      if (table.at(i, j) < -table.tolerance()) score[i] -= 1.0;
    }
  }
  return rank_candidates(table.candidates(), score, base_rank_of(table, base), k);
}

RankedPairsOutcome ranked_pairs_outcome(std::span<const Ballot> ballots, const ScoredList& base) {
  const auto table = pairwise_margins(ballots);
  const auto base_rank = base_rank_of(table, base);
  const auto& names = table.candidates();
  const std::size_t n = table.size();

  struct Pair {
    std::size_t winner;
    std::size_t loser;
    double margin;
  };
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && table.at(i, j) > table.tolerance()) pairs.push_back({i, j, table.at(i, j)});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [&](const Pair& a, const Pair& b) {
    const auto qa = quantize(a.margin);
    const auto qb = quantize(b.margin);
    if (qa != qb) return qa > qb;
    if (base_rank[a.winner] != base_rank[b.winner]) return base_rank[a.winner] < base_rank[b.winner];
    if (names[a.winner] != names[b.winner]) return names[a.winner] < names[b.winner];
    return names[a.loser] < names[b.loser];
  });

  std::vector<std::vector<std::size_t>> edges(n);
  std::vector<std::size_t> in_degree(n, 0);
  auto reaches = [&](std::size_t from, std::size_t to) {
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> stack{from};
    seen[from] = 1;
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      if (v == to) return true;
      for (auto w : edges[v]) {
        if (!seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
      }
    }
    return false;
  };

  RankedPairsOutcome outcome;
  for (const auto& p : pairs) {
    LockedPair lp{names[p.winner], names[p.loser], p.margin};
    if (reaches(p.loser, p.winner)) {
      outcome.skipped.push_back(std::move(lp));
      continue;
    }
    edges[p.winner].push_back(p.loser);
    ++in_degree[p.loser];
    if (reaches(p.loser, p.winner)) throw std::logic_error("ranked pairs lock graph became cyclic");
    outcome.locked.push_back(std::move(lp));
  }

  // Topological order; among available candidates the best base rank goes first.
  std::vector<char> placed(n, 0);
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t pick = n;
    for (std::size_t v = 0; v < n; ++v) {
      if (placed[v] || in_degree[v] != 0) continue;
      if (pick == n || base_rank[v] < base_rank[pick]) pick = v;
    }
    if (pick == n) throw std::logic_error("ranked pairs lock graph has a cycle");
    placed[pick] = 1;
    outcome.order.push_back(names[pick]);
    for (auto w : edges[pick]) --in_degree[w];
  }
  return outcome;
}

ScoredList ranked_pairs(std::span<const Ballot> ballots, std::size_t k, const ScoredList& base) {
  const auto outcome = ranked_pairs_outcome(ballots, base);
  const std::size_t n = outcome.order.size();
  std::vector<ScoredItem> out;
  for (std::size_t p = 0; p < std::min(k, n); ++p) {
    out.push_back({outcome.order[p], static_cast<double>(n - 1 - p)});
  }
  return ScoredList::from_ranked(std::move(out));
}

ScoredList choose(ChoiceMechanism mechanism, const ScoredList& base, const AgentAllocation& beta,
                  const AgentLists& agent_lists, const ChoiceConfig& cfg) {
  if (cfg.output_size > base.size()) {
    throw Error("output size " + std::to_string(cfg.output_size) + " exceeds candidate count " +
                std::to_string(base.size()));
  }
  if (!(cfg.lambda >= 0.0 && cfg.lambda <= 1.0)) throw Error("lambda outside [0,1]");
  if (mechanism == ChoiceMechanism::kRescore) return rescore(base, beta, agent_lists, cfg);

  const auto ballots = make_ballots(base, beta, agent_lists, cfg.lambda);
  const bool agents_vote = std::any_of(ballots.begin(), ballots.end(),
                                       [](const Ballot& b) { return b.voter != kRecommenderVoter; });
  if (!agents_vote) return base.top(cfg.output_size);

  switch (mechanism) {
    case ChoiceMechanism::kBorda:
      return borda(ballots, cfg.output_size, base);
    case ChoiceMechanism::kCopeland:
      return copeland(ballots, cfg.output_size, base);
    case ChoiceMechanism::kRankedPairs:
      return ranked_pairs(ballots, cfg.output_size, base);
    case ChoiceMechanism::kRescore:
      break;
  }
  throw Error("unhandled choice mechanism");
}

}  // namespace scruf
