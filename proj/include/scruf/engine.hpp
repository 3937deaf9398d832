#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "scruf/agents.hpp"
#include "scruf/allocation.hpp"
#include "scruf/choice.hpp"
#include "scruf/evaluation.hpp"
#include "scruf/model.hpp"

namespace scruf {

struct DataPaths {
  std::filesystem::path items;
  std::filesystem::path reclists;
  std::filesystem::path compat;    // optional
  std::filesystem::path arrivals;  // optional
  std::filesystem::path profiles;  // optional: user_id, item_id rows for entropy compatibility
};

struct ExperimentConfig {
  DataPaths data;
  std::vector<AgentSpec> agents;
  AllocationMechanism allocation = AllocationMechanism::kLottery;
  ChoiceMechanism choice = ChoiceMechanism::kRescore;
  double lambda = 1.0;
  std::map<std::string, double> delta;
  std::size_t window = History::kDefaultWindow;
  std::size_t output_size = 10;
  std::uint64_t seed = 0;
  Relevance relevance = Relevance::kGraded;
  std::filesystem::path output_dir = ".";
  std::string history_file = "history.jsonl";
  std::string metrics_file = "metrics.csv";

  std::vector<std::string> agent_names() const;
  ChoiceConfig choice_config() const;

  // Relative data and output paths resolve against `base_dir`.
  static ExperimentConfig from_json(const nlohmann::json& tree, const std::filesystem::path& base_dir);
};

// Reads a JSON configuration tree.
nlohmann::json load_config_tree(const std::filesystem::path& path);

// Applies "dotted.key=value" to an existing key of `tree`. Values parse as
// JSON when possible and as plain strings otherwise.
void apply_override(nlohmann::json& tree, const std::string& assignment);

ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

struct Dataset {
  Catalog catalog;
  std::map<std::string, UserProfile> users;
  std::map<std::string, ScoredList> rec_lists;
  std::vector<std::string> arrivals;
};

Dataset ingest(const ExperimentConfig& config);

// What the mechanisms saw at one step, in agent registration order.
struct StepEvaluation {
  std::vector<double> fairness;
  std::vector<double> compatibility;
};

// One pass of users through allocation and choice.
class Simulation {
 public:
  Simulation(const ExperimentConfig& config, const Dataset& data);

  const StepRecord& step(const std::string& user);

  const History& history() const { return history_; }
  const std::vector<StepEvaluation>& evaluations() const { return evaluations_; }

 private:
  const ExperimentConfig& config_;
  const Dataset& data_;
  ChoiceConfig choice_;
  History history_;
  std::vector<StepEvaluation> evaluations_;
  Rng rng_;
};

struct RunResult {
  std::string allocation;
  std::string choice;
  double lambda = 1.0;
  std::vector<std::string> agents;
  History history;
  std::vector<StepEvaluation> evaluations;
  RunMetrics metrics;
};

RunMetrics compute_metrics(const ExperimentConfig& config, const Dataset& data, const History& history,
                           const std::vector<StepEvaluation>& evaluations);

RunResult run(const ExperimentConfig& config, const Dataset& data);
RunResult run(const ExperimentConfig& config);

// Result files.
std::string history_jsonl(const RunResult& result);
std::string metrics_csv(const RunResult& result);
nlohmann::ordered_json metrics_json(const RunResult& result);
void write_result(const RunResult& result, const ExperimentConfig& config);

struct SweepRow {
  double lambda = 1.0;
  RunMetrics metrics;
  double ndcg_loss = 0.0;  // relative to the lambda = 1 baseline
  bool selected = false;
};

struct SweepResult {
  std::string allocation;
  std::string choice;
  std::vector<std::string> agents;
  double baseline_ndcg = 0.0;
  std::vector<SweepRow> rows;
};

// One independent run per lambda, in parallel. The selected row has the
// greatest L1/2 among rows with nDCG loss at most `max_ndcg_loss`.
SweepResult sweep(const ExperimentConfig& config, const Dataset& data, const std::vector<double>& lambdas,
                  double max_ndcg_loss = 0.05);

std::string sweep_csv(const SweepResult& sweep);

// 0.11, 0.21, ..., 0.91, 1.0
std::vector<double> default_lambda_grid();

}  // namespace scruf
