#include "scruf/report.hpp"

#include <fstream>
#include <limits>

#include "json.hpp"
#include "scruf/evaluation.hpp"
#include "scruf/model.hpp"
#include "scruf/text_io.hpp"

namespace scruf {

double RunSummary::final_regret(std::size_t agent) const {
  const auto& s = regret_series.at(agent);
  return s.empty() ? 0.0 : s.back();
}

RunSummary load_run(const std::filesystem::path& dir, const std::string& history_file) {
  RunSummary run;
  run.label = dir.filename().string();
  if (run.label.empty()) run.label = dir.parent_path().filename().string();
  try {
    const auto metrics = nlohmann::json::parse(read_file(dir / "metrics.json"));
    run.allocation = metrics.at("allocation").get<std::string>();
    run.choice = metrics.at("choice").get<std::string>();
    run.lambda = metrics.at("lambda").get<double>();
    run.agents = metrics.at("agents").get<std::vector<std::string>>();
    run.ndcg = metrics.at("ndcg").get<double>();
    for (const auto& a : run.agents) run.fairness.push_back(metrics.at("fairness").at(a).get<double>());
    run.l_half = metrics.at("l_half").get<double>();
    run.avg = metrics.at("avg").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error((dir / "metrics.json").string() + ": " + e.what());
  }

  const auto path = dir / history_file;
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<std::vector<double>> in_loop(run.agents.size());
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    try {
      const auto rec = nlohmann::json::parse(line);
      for (std::size_t a = 0; a < run.agents.size(); ++a) {
        in_loop[a].push_back(rec.at("m").at(run.agents[a]).get<double>());
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(path.string() + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  for (const auto& series : in_loop) run.regret_series.push_back(fairness_regret(series));
  return run;
}

bool dominates(const RunSummary& a, const RunSummary& b) {
  const bool no_worse = a.ndcg >= b.ndcg && a.l_half >= b.l_half;
  const bool better = a.ndcg > b.ndcg || a.l_half > b.l_half;
  return no_worse && better;
}

Report build_report(const std::vector<RunSummary>& runs, std::optional<std::size_t> baseline) {
  if (runs.empty()) throw Error("report needs at least one run");
  if (!baseline) {
    for (std::size_t i = 0; i < runs.size(); ++i) {
      if (runs[i].is_baseline()) {
        baseline = i;
        break;
      }
    }
  }
  if (baseline && *baseline >= runs.size()) throw Error("baseline run index out of range");

  std::size_t n_agents = 0;
  for (const auto& r : runs) n_agents = std::max(n_agents, r.agents.size());

  std::string header = "run,Allocation,Choice,lambda,nDCG";
  for (std::size_t a = 0; a < n_agents; ++a) header += ",m" + std::to_string(a + 1);
  header += ",L_half,Avg";
  for (std::size_t a = 0; a < n_agents; ++a) header += ",G" + std::to_string(a + 1);
  for (std::size_t a = 0; a < n_agents; ++a) header += ",regret_ratio" + std::to_string(a + 1);
  header += ",dominated\n";

  Report report;
  report.tradeoff_csv = header;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i];
    std::string row = r.label + "," + r.allocation + "," + r.choice + "," + format_double(r.lambda) + "," +
                      format_double(r.ndcg);
    for (std::size_t a = 0; a < n_agents; ++a) row += "," + (a < r.fairness.size() ? format_double(r.fairness[a]) : "");
    row += "," + format_double(r.l_half) + "," + format_double(r.avg);
    for (std::size_t a = 0; a < n_agents; ++a) {
      row += "," + (a < r.agents.size() ? format_double(r.final_regret(a)) : "");
    }
    for (std::size_t a = 0; a < n_agents; ++a) {
      std::string cell;
      if (baseline && a < r.agents.size() && a < runs[*baseline].agents.size()) {
        const double base = runs[*baseline].final_regret(a);
        const double mine = r.final_regret(a);
        cell = mine > 0.0 ? format_double(base / mine) : (base > 0.0 ? "inf" : "1");
      }
      row += "," + cell;
    }
    bool dominated = false;
    for (std::size_t j = 0; j < runs.size(); ++j) {
      if (j != i && dominates(runs[j], r)) dominated = true;
    }
    row += dominated ? ",1\n" : ",0\n";
    report.tradeoff_csv += row;
  }

  report.regret_csv = "run,agent,t,regret\n";
  for (const auto& r : runs) {
    for (std::size_t a = 0; a < r.agents.size(); ++a) {
      const auto& series = r.regret_series[a];
      for (std::size_t t = 0; t < series.size(); ++t) {
        report.regret_csv += r.label + "," + r.agents[a] + "," + std::to_string(t) + "," + format_double(series[t]) + "\n";
      }
    }
  }
  return report;
}

}  // namespace scruf
