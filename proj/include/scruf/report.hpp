#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace scruf {

// A finished run as read back from its output directory.
struct RunSummary {
  std::string label;
  std::string allocation;
  std::string choice;
  double lambda = 1.0;
  std::vector<std::string> agents;
  double ndcg = 0.0;
  std::vector<double> fairness;
  double l_half = 0.0;
  double avg = 0.0;
  std::vector<std::vector<double>> regret_series;  // per agent, rebuilt from recorded m values

  double final_regret(std::size_t agent) const;
  bool is_baseline() const { return allocation == "none" || lambda == 1.0; }
};

// Reads metrics.json and the history file of a run directory.
RunSummary load_run(const std::filesystem::path& dir, const std::string& history_file = "history.jsonl");

struct Report {
  std::string tradeoff_csv;
  std::string regret_csv;
};

// True when `a` is at least as good as `b` on nDCG and L1/2 and strictly
// better on one of them.
bool dominates(const RunSummary& a, const RunSummary& b);

// `baseline` indexes the run that regret ratios are taken against; when
// absent the first baseline-looking run is used, if any.
Report build_report(const std::vector<RunSummary>& runs, std::optional<std::size_t> baseline = std::nullopt);

}  // namespace scruf
