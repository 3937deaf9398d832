#include "scruf/engine.hpp"

#include <algorithm>
#include <future>
#include <set>
#include <sstream>

#include "scruf/text_io.hpp"

namespace scruf {

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return {};
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::string where(const std::filesystem::path& file, std::size_t line) {
  return file.string() + ":" + std::to_string(line);
}

void load_items(const std::filesystem::path& path, Catalog& catalog) {
  std::map<std::string, Item> items;
  std::vector<std::string> order;
  for (const auto& row : read_tsv(path, 3)) {
    const auto& id = row.fields[0];
    if (id.empty() || row.fields[1].empty()) throw Error(where(path, row.line) + ": empty item id or feature");
    auto [it, inserted] = items.try_emplace(id);
    if (inserted) {
      it->second.id = id;
      order.push_back(id);
    }
    if (!it->second.features.emplace(row.fields[1], row.fields[2]).second) {
      throw Error(where(path, row.line) + ": feature '" + row.fields[1] + "' repeated for item " + id);
    }
  }
  for (const auto& id : order) catalog.add(std::move(items.at(id)));
}

void load_rec_lists(const std::filesystem::path& path, const Catalog& catalog, Dataset& data,
                    std::vector<std::string>& first_seen) {
  std::map<std::string, std::vector<ScoredItem>> lists;
  std::string current;
  for (const auto& row : read_tsv(path, 3)) {
    const auto& user = row.fields[0];
    const auto& item = row.fields[1];
    if (user.empty()) throw Error(where(path, row.line) + ": empty user id");
    if (!catalog.contains(item)) throw Error(where(path, row.line) + ": unknown item id " + item);
    const double score = parse_double(row.fields[2], where(path, row.line));
    if (user != current) {
      if (lists.count(user)) throw Error(where(path, row.line) + ": rows for user " + user + " are not grouped");
      current = user;
      first_seen.push_back(user);
    }
    auto& entries = lists[user];
    if (!entries.empty() && score > entries.back().score) {
      throw Error(where(path, row.line) + ": scores for user " + user + " are not in descending order");
    }
    for (const auto& e : entries) {
      if (e.item_id == item) throw Error(where(path, row.line) + ": item " + item + " repeated for user " + user);
    }
    entries.push_back({item, score});
  }
  for (auto& [user, entries] : lists) {
    data.rec_lists.emplace(user, ScoredList::from_ranked(std::move(entries)));
    data.users[user].id = user;
  }
}

void load_compat(const std::filesystem::path& path, const std::set<std::string>& agents, Dataset& data) {
  for (const auto& row : read_tsv(path, 3)) {
    const auto& user = row.fields[0];
    const auto& agent = row.fields[1];
    auto it = data.users.find(user);
    if (it == data.users.end()) throw Error(where(path, row.line) + ": user " + user + " has no recommendation list");
    const double value = parse_double(row.fields[2], where(path, row.line));
    if (!(value >= 0.0 && value <= 1.0)) throw Error(where(path, row.line) + ": compatibility outside [0,1]");
    if (agents.count(agent)) it->second.set_compatibility(agent, value);
  }
}

std::map<std::string, std::vector<Item>> load_profiles(const std::filesystem::path& path, const Catalog& catalog) {
  std::map<std::string, std::vector<Item>> profiles;
  for (const auto& row : read_tsv(path, 2)) {
    if (!catalog.contains(row.fields[1])) throw Error(where(path, row.line) + ": unknown item id " + row.fields[1]);
    profiles[row.fields[0]].push_back(catalog.at(row.fields[1]));
  }
  return profiles;
}

std::vector<std::string> load_arrivals(const std::filesystem::path& path, const Dataset& data) {
  std::vector<std::string> order;
  for (const auto& row : read_tsv(path, 1)) {
    const auto& user = row.fields[0];
    if (!data.rec_lists.count(user)) throw Error(where(path, row.line) + ": user " + user + " has no recommendation list");
    order.push_back(user);
  }
  return order;
}

std::string join_csv(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  return out;
}

std::vector<std::string> table_header(std::size_t n_agents) {
  std::vector<std::string> h{"Allocation", "Choice", "lambda", "nDCG"};
  for (std::size_t i = 0; i < n_agents; ++i) h.push_back("m" + std::to_string(i + 1));
  h.push_back("L_half");
  h.push_back("Avg");
  return h;
}

std::vector<std::string> table_row(const std::string& allocation, const std::string& choice, double lambda,
                                   const RunMetrics& m) {
  std::vector<std::string> r{allocation, choice, format_double(lambda), format_double(m.ndcg)};
  for (double f : m.global_fairness) r.push_back(format_double(f));
  r.push_back(format_double(m.l_half));
  r.push_back(format_double(m.mean_fairness));
  return r;
}

}  // namespace

std::vector<std::string> ExperimentConfig::agent_names() const {
  std::vector<std::string> names;
  for (const auto& a : agents) names.push_back(a.name);
  return names;
}

ChoiceConfig ExperimentConfig::choice_config() const {
  ChoiceConfig c;
  c.lambda = lambda;
  c.delta = delta;
  c.output_size = output_size;
  return c;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& tree, const std::filesystem::path& base_dir) {
  ExperimentConfig c;
  try {
    const auto& data = tree.at("data");
    c.data.items = resolve(base_dir, data.at("items").get<std::string>());
    c.data.reclists = resolve(base_dir, data.at("reclists").get<std::string>());
    c.data.compat = resolve(base_dir, data.value("compat", ""));
    c.data.arrivals = resolve(base_dir, data.value("arrivals", ""));
    c.data.profiles = resolve(base_dir, data.value("profiles", ""));

    std::set<std::string> names;
    for (const auto& a : tree.value("agents", nlohmann::json::array())) {
      AgentSpec spec;
      spec.name = a.at("name").get<std::string>();
      spec.predicate.feature = a.at("feature").get<std::string>();
      for (const auto& v : a.at("values")) spec.predicate.values.insert(v.get<std::string>());
      spec.metric = parse_metric_kind(a.value("metric", "proportional_exposure"));
      spec.target = a.at("target").get<double>();
      spec.validate();
      if (!names.insert(spec.name).second) throw Error("agent " + spec.name + " defined twice");
      const double delta = a.value("delta", 1.0);
      if (!(delta > 0.0)) throw Error("agent " + spec.name + ": delta must be positive");
      c.delta[spec.name] = delta;
      c.agents.push_back(std::move(spec));
    }

    c.allocation = parse_allocation_mechanism(tree.at("allocation").at("mechanism").get<std::string>());
    const auto& choice = tree.at("choice");
    c.choice = parse_choice_mechanism(choice.at("mechanism").get<std::string>());
    c.lambda = choice.value("lambda", 1.0);
    if (!(c.lambda >= 0.0 && c.lambda <= 1.0)) throw Error("choice.lambda must lie in [0,1]");
    c.window = tree.value("window", static_cast<std::size_t>(History::kDefaultWindow));
    if (c.window == 0) throw Error("window must be positive");
    c.output_size = tree.value("output_size", std::size_t{10});
    if (c.output_size == 0) throw Error("output_size must be positive");
    c.seed = tree.value("seed", std::uint64_t{0});
    if (tree.contains("evaluation")) {
      c.relevance = parse_relevance(tree.at("evaluation").value("relevance", "graded"));
    }
    if (tree.contains("output")) {
      const auto& out = tree.at("output");
      c.output_dir = resolve(base_dir, out.value("dir", "."));
      c.history_file = out.value("history", c.history_file);
      c.metrics_file = out.value("metrics", c.metrics_file);
    } else {
      c.output_dir = base_dir;
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("invalid config: ") + e.what());
  }
  return c;
}

nlohmann::json load_config_tree(const std::filesystem::path& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void apply_override(nlohmann::json& tree, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw Error("override must look like key=value: " + assignment);
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);

  nlohmann::json* node = &tree;
  for (const auto& part : split(key, '.')) {
    if (node->is_object()) {
      if (!node->contains(part)) throw Error("override refers to unknown config key: " + key);
      node = &(*node)[part];
    } else if (node->is_array()) {
      std::size_t idx = 0;
      try {
        idx = std::stoul(part);
      } catch (const std::exception&) {
        throw Error("override index is not a number: " + key);
      }
      if (idx >= node->size()) throw Error("override index out of range: " + key);
      node = &(*node)[idx];
    } else {
      throw Error("override refers to unknown config key: " + key);
    }
  }
  nlohmann::json value = nlohmann::json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  *node = value;
}

ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  auto tree = load_config_tree(path);
  for (const auto& o : overrides) apply_override(tree, o);
  return ExperimentConfig::from_json(tree, path.parent_path());
}

Dataset ingest(const ExperimentConfig& config) {
  Dataset data;
  load_items(config.data.items, data.catalog);
  apply_agents(data.catalog, config.agents);

  std::vector<std::string> first_seen;
  load_rec_lists(config.data.reclists, data.catalog, data, first_seen);
  for (const auto& [user, list] : data.rec_lists) {
    if (list.size() < config.output_size) {
      throw Error("recommendation list of user " + user + " has " + std::to_string(list.size()) +
                  " items, fewer than output_size " + std::to_string(config.output_size));
    }
  }

  const auto names = config.agent_names();
  const std::set<std::string> agent_set(names.begin(), names.end());
  if (!config.data.compat.empty()) load_compat(config.data.compat, agent_set, data);

  std::map<std::string, std::vector<Item>> profiles;
  if (!config.data.profiles.empty()) profiles = load_profiles(config.data.profiles, data.catalog);
  for (auto& [id, user] : data.users) {
    for (const auto& agent : config.agents) {
      if (user.compatibility.count(agent.name)) continue;
      auto p = profiles.find(id);
      if (p == profiles.end() || p->second.empty()) {
        throw Error("user " + id + " has no compatibility for agent " + agent.name +
                    " and no profile for the entropy fallback");
      }
      user.set_compatibility(agent.name, compatibility_entropy(p->second, agent));
    }
  }

  data.arrivals = config.data.arrivals.empty() ? first_seen : load_arrivals(config.data.arrivals, data);
  return data;
}

Simulation::Simulation(const ExperimentConfig& config, const Dataset& data)
    : config_(config), data_(data), choice_(config.choice_config()), history_(config.window), rng_(config.seed) {}

const StepRecord& Simulation::step(const std::string& user) {
  auto list_it = data_.rec_lists.find(user);
  if (list_it == data_.rec_lists.end()) throw Error("user " + user + " has no recommendation list");
  const auto& profile = data_.users.at(user);
  const auto window = history_.window();

  AllocationInput input;
  StepEvaluation eval;
  for (const auto& agent : config_.agents) {
    const double m = evaluate_fairness(agent, window, data_.catalog);
    const double c = profile.compatibility.at(agent.name);
    input.agents.push_back({agent.name, m, c});
    eval.fairness.push_back(m);
    eval.compatibility.push_back(c);
  }

  StepRecord record;
  record.time = history_.size();
  record.user_id = user;
  record.base_list = list_it->second;
  record.allocation = allocate(config_.allocation, input, rng_);
  for (const auto& agent : config_.agents) {
    record.agent_lists.emplace(agent.name, agent_preference(agent, record.base_list, data_.catalog));
  }
  record.output_list = choose(config_.choice, record.base_list, record.allocation, record.agent_lists, choice_);
  if (record.output_list.size() != config_.output_size) throw Error("choice produced a list of the wrong length");

  history_.append(std::move(record));
  evaluations_.push_back(std::move(eval));
  return history_.records().back();
}

RunMetrics compute_metrics(const ExperimentConfig& config, const Dataset& data, const History& history,
                           const std::vector<StepEvaluation>& evaluations) {
  RunMetrics m;
  m.agents = config.agent_names();
  const auto records = history.records();
  if (records.empty()) return m;

  double ndcg = 0.0;
  for (const auto& rec : records) {
    ndcg += ndcg_at_k(rec.output_list, rec.base_list, config.output_size, config.relevance);
  }
  m.ndcg = ndcg / static_cast<double>(records.size());

  for (std::size_t a = 0; a < config.agents.size(); ++a) {
    m.global_fairness.push_back(global_fairness(records, config.agents[a], data.catalog));
    std::vector<double> in_loop;
    in_loop.reserve(evaluations.size());
    for (const auto& e : evaluations) in_loop.push_back(e.fairness.at(a));
    m.regret_series.push_back(fairness_regret(in_loop));
  }
  if (!m.global_fairness.empty()) {
    m.l_half = l_half(m.global_fairness);
    double sum = 0.0;
    for (double f : m.global_fairness) sum += f;
    m.mean_fairness = sum / static_cast<double>(m.global_fairness.size());
  }
  return m;
}

RunResult run(const ExperimentConfig& config, const Dataset& data) {
  Simulation sim(config, data);
  for (std::size_t t = 0; t < data.arrivals.size(); ++t) {
    const auto& user = data.arrivals[t];
    try {
      sim.step(user);
    } catch (const Error& e) {
      throw Error("step " + std::to_string(t) + " (user " + user + "): " + e.what());
    }
  }
  RunResult result;
  result.allocation = to_string(config.allocation);
  result.choice = to_string(config.choice);
  result.lambda = config.lambda;
  result.agents = config.agent_names();
  result.metrics = compute_metrics(config, data, sim.history(), sim.evaluations());
  result.history = sim.history();
  result.evaluations = sim.evaluations();
  return result;
}

RunResult run(const ExperimentConfig& config) { return run(config, ingest(config)); }

std::string history_jsonl(const RunResult& result) {
  std::string out;
  const auto records = result.history.records();
  for (std::size_t t = 0; t < records.size(); ++t) {
    const auto& rec = records[t];
    nlohmann::ordered_json line;
    line["t"] = rec.time;
    line["user"] = rec.user_id;
    nlohmann::ordered_json beta = nlohmann::ordered_json::object();
    for (const auto& w : rec.allocation.weights()) beta[w.agent] = w.weight;
    line["beta"] = beta;
    auto output = nlohmann::ordered_json::array();
    for (const auto& e : rec.output_list) output.push_back({{"item", e.item_id}, {"score", e.score}});
    line["output"] = output;
    nlohmann::ordered_json m = nlohmann::ordered_json::object();
    nlohmann::ordered_json c = nlohmann::ordered_json::object();
    for (std::size_t a = 0; a < result.agents.size(); ++a) {
      m[result.agents[a]] = result.evaluations[t].fairness[a];
      c[result.agents[a]] = result.evaluations[t].compatibility[a];
    }
    line["m"] = m;
    line["c"] = c;
    out += line.dump() + "\n";
  }
  return out;
}

std::string metrics_csv(const RunResult& result) {
  return join_csv(table_header(result.agents.size())) + "\n" +
         join_csv(table_row(result.allocation, result.choice, result.lambda, result.metrics)) + "\n";
}

nlohmann::ordered_json metrics_json(const RunResult& result) {
  nlohmann::ordered_json j;
  j["allocation"] = result.allocation;
  j["choice"] = result.choice;
  j["lambda"] = result.lambda;
  j["agents"] = result.agents;
  j["steps"] = result.history.size();
  j["ndcg"] = result.metrics.ndcg;
  nlohmann::ordered_json fairness = nlohmann::ordered_json::object();
  nlohmann::ordered_json regret = nlohmann::ordered_json::object();
  for (std::size_t a = 0; a < result.agents.size(); ++a) {
    fairness[result.agents[a]] = result.metrics.global_fairness[a];
    regret[result.agents[a]] = result.metrics.final_regret(a);
  }
  j["fairness"] = fairness;
  j["l_half"] = result.metrics.l_half;
  j["avg"] = result.metrics.mean_fairness;
  j["final_regret"] = regret;
  return j;
}

void write_result(const RunResult& result, const ExperimentConfig& config) {
  write_file(config.output_dir / config.history_file, history_jsonl(result));
  write_file(config.output_dir / config.metrics_file, metrics_csv(result));
  write_file(config.output_dir / "metrics.json", metrics_json(result).dump(2) + "\n");
}

std::vector<double> default_lambda_grid() {
  return {0.11, 0.21, 0.31, 0.41, 0.51, 0.61, 0.71, 0.81, 0.91, 1.0};
}

SweepResult sweep(const ExperimentConfig& config, const Dataset& data, const std::vector<double>& lambdas,
                  double max_ndcg_loss) {
  for (double l : lambdas) {
    if (!(l >= 0.0 && l <= 1.0)) throw Error("sweep lambda outside [0,1]: " + format_double(l));
  }
  auto run_at = [&config, &data](double lambda) {
    ExperimentConfig c = config;
    c.lambda = lambda;
    return run(c, data).metrics;
  };

  std::vector<std::future<RunMetrics>> pending;
  pending.reserve(lambdas.size());
  for (double l : lambdas) pending.push_back(std::async(std::launch::async, run_at, l));

  SweepResult result;
  result.allocation = to_string(config.allocation);
  result.choice = to_string(config.choice);
  result.agents = config.agent_names();
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    SweepRow row;
    row.lambda = lambdas[i];
    row.metrics = pending[i].get();
    result.rows.push_back(std::move(row));
  }

  auto baseline = std::find_if(result.rows.begin(), result.rows.end(), [](const SweepRow& r) { return r.lambda == 1.0; });
  result.baseline_ndcg = baseline != result.rows.end() ? baseline->metrics.ndcg : run_at(1.0).ndcg;

  SweepRow* best = nullptr;
  for (auto& row : result.rows) {
    row.ndcg_loss = result.baseline_ndcg > 0.0 ? (result.baseline_ndcg - row.metrics.ndcg) / result.baseline_ndcg : 0.0;
    if (row.ndcg_loss <= max_ndcg_loss + 1e-12 && (best == nullptr || row.metrics.l_half > best->metrics.l_half)) {
      best = &row;
    }
  }
  if (best) best->selected = true;
  return result;
}

std::string sweep_csv(const SweepResult& sweep) {
  auto header = table_header(sweep.agents.size());
  header.push_back("nDCG_loss");
  header.push_back("selected");
  std::string out = join_csv(header) + "\n";
  for (const auto& row : sweep.rows) {
    auto cells = table_row(sweep.allocation, sweep.choice, row.lambda, row.metrics);
    cells.push_back(format_double(row.ndcg_loss));
    cells.push_back(row.selected ? "1" : "0");
    out += join_csv(cells) + "\n";
  }
  return out;
}

}  // namespace scruf
