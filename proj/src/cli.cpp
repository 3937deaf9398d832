#include "scruf/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "scruf/engine.hpp"
#include "scruf/report.hpp"
#include "scruf/synthetic.hpp"
#include "scruf/text_io.hpp"

namespace scruf {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string config;
  std::string out;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::string lambdas;
  std::vector<std::string> runs;
  std::string baseline;
};

// --out, then $SCRUF_OUT, then `fallback`.
fs::path output_dir(const Options& opt, const fs::path& fallback) {
  if (!opt.out.empty()) return opt.out;
  if (const char* env = std::getenv("SCRUF_OUT"); env != nullptr && *env != '\0') return env;
  return fallback;
}

nlohmann::json config_tree(const Options& opt) {
  auto tree = load_config_tree(opt.config);
  for (const auto& s : opt.sets) apply_override(tree, s);
  if (opt.seed) tree["seed"] = *opt.seed;
  return tree;
}

ExperimentConfig experiment(const Options& opt) {
  auto config = ExperimentConfig::from_json(config_tree(opt), fs::path(opt.config).parent_path());
  config.output_dir = output_dir(opt, config.output_dir);
  return config;
}

void print_table(std::ostream& out, const std::string& csv) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> width;
  for (const auto& line : split(csv, '\n')) {
    if (line.empty()) continue;
    rows.push_back(split(line, ','));
    width.resize(std::max(width.size(), rows.back().size()), 0);
    for (std::size_t i = 0; i < rows.back().size(); ++i) width[i] = std::max(width[i], rows.back()[i].size());
  }
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << std::left << std::setw(static_cast<int>(width[i]) + 2) << row[i];
    }
    out << '\n';
  }
}

int cmd_generate(const Options& opt, std::ostream& out) {
  const auto spec = synthetic::GeneratorSpec::from_json(config_tree(opt));
  const auto dir = output_dir(opt, ".");
  const auto data = synthetic::generate(spec);
  synthetic::write_dataset(data, dir);
  out << "generated " << data.users.ids.size() << " users, " << data.items.ids.size() << " items, lists of "
      << spec.list_length << " into " << dir.string() << '\n';
  return 0;
}

int cmd_run(const Options& opt, std::ostream& out) {
  const auto config = experiment(opt);
  const auto result = run(config);
  write_result(result, config);
  print_table(out, metrics_csv(result));
  return 0;
}

int cmd_sweep(const Options& opt, std::ostream& out) {
  const auto config = experiment(opt);
  std::vector<double> lambdas;
  if (opt.lambdas.empty()) {
    lambdas = default_lambda_grid();
  } else {
    for (const auto& part : split(opt.lambdas, ',')) lambdas.push_back(parse_double(part, "--lambdas"));
  }
  const auto data = ingest(config);
  const auto result = sweep(config, data, lambdas);
  const auto csv = sweep_csv(result);
  write_file(config.output_dir / "sweep.csv", csv);
  print_table(out, csv);
  return 0;
}

int cmd_report(const Options& opt, std::ostream& out) {
  std::vector<RunSummary> runs;
  for (const auto& dir : opt.runs) runs.push_back(load_run(dir));
  std::optional<std::size_t> baseline;
  if (!opt.baseline.empty()) {
    runs.insert(runs.begin(), load_run(opt.baseline));
    baseline = 0;
  }
  const auto report = build_report(runs, baseline);
  const auto dir = output_dir(opt, ".");
  write_file(dir / "tradeoff.csv", report.tradeoff_csv);
  write_file(dir / "regret.csv", report.regret_csv);
  print_table(out, report.tradeoff_csv);
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-agent fairness-aware re-ranking simulator"};
  app.require_subcommand(1);
  Options opt;

  auto* generate = app.add_subcommand("generate", "write a synthetic dataset");
  generate->add_option("--config,--spec", opt.config, "generator spec (JSON)")->required()->check(CLI::ExistingFile);

  auto* run_cmd = app.add_subcommand("run", "simulate one experiment");
  run_cmd->add_option("--config", opt.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);

  auto* sweep_cmd = app.add_subcommand("sweep", "simulate one experiment per recommender weight");
  sweep_cmd->add_option("--config", opt.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--lambdas", opt.lambdas, "comma-separated lambda values");

  for (auto* sub : {generate, run_cmd, sweep_cmd}) {
    sub->add_option("--set", opt.sets, "override an existing config key: key.path=value");
    sub->add_option("--seed", opt.seed, "random seed");
  }

  auto* report = app.add_subcommand("report", "combine finished runs into trade-off and regret tables");
  report->add_option("runs", opt.runs, "run output directories")->required()->check(CLI::ExistingDirectory);
  report->add_option("--baseline", opt.baseline, "run directory to compute regret ratios against")
      ->check(CLI::ExistingDirectory);

  for (auto* sub : {generate, run_cmd, sweep_cmd, report}) {
    sub->add_option("--out", opt.out, "output directory (default: $SCRUF_OUT)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (generate->parsed()) return cmd_generate(opt, out);
    if (run_cmd->parsed()) return cmd_run(opt, out);
    if (sweep_cmd->parsed()) return cmd_sweep(opt, out);
    if (report->parsed()) return cmd_report(opt, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace scruf
