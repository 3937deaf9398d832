#include "scruf/synthetic.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include "scruf/text_io.hpp"

namespace scruf::synthetic {

namespace {

std::string padded(char prefix, std::size_t index, std::size_t count) {
  const std::size_t width = std::to_string(count > 0 ? count - 1 : 0).size();
  std::string digits = std::to_string(index);
  return std::string(1, prefix) + std::string(width - std::min(width, digits.size()), '0') + digits;
}

void check_probability(double p, const std::string& what) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(what + " must lie in [0,1]");
}

}  // namespace

Normal SegmentSpec::distribution_for(std::size_t factor, const Normal& fallback) const {
  for (const auto& o : propensities) {
    if (o.factor == factor) return o.dist;
  }
  return fallback;
}

void GeneratorSpec::validate() const {
  if (n_users == 0 || n_items == 0) throw Error("generator: n_users and n_items must be positive");
  if (k_factors == 0) throw Error("generator: k_factors must be positive");
  if (k_sensitive > k_factors) throw Error("generator: k_sensitive exceeds k_factors");
  if (item_feature_probabilities.size() != k_sensitive) {
    throw Error("generator: need one item feature probability per sensitive factor");
  }
  for (double p : item_feature_probabilities) check_probability(p, "generator: item feature probability");
  check_probability(nonsensitive_item_probability, "generator: nonsensitive item probability");
  if (factor_sigma < 0.0 || default_user_propensity.stddev < 0.0) {
    throw Error("generator: standard deviations must be non-negative");
  }
  if (ratings_per_user == 0 || list_length == 0) throw Error("generator: m and m' must be positive");
  if (list_length > ratings_per_user) throw Error("generator: list_length exceeds ratings_per_user");
  if (ratings_per_user > n_items) throw Error("generator: ratings_per_user exceeds n_items");
  if (!agent_names.empty() && agent_names.size() != k_sensitive) {
    throw Error("generator: need one agent name per sensitive factor");
  }
  std::size_t total = 0;
  for (const auto& s : segments) {
    total += s.size;
    for (const auto& o : s.propensities) {
      if (o.factor >= k_factors) throw Error("generator: segment " + s.name + " overrides unknown factor");
      if (o.dist.stddev < 0.0) throw Error("generator: segment " + s.name + " has negative stddev");
    }
  }
  if (!segments.empty() && total != n_users) {
    throw Error("generator: segment sizes sum to " + std::to_string(total) + ", expected n_users = " +
                std::to_string(n_users));
  }
}

std::string GeneratorSpec::agent_name(std::size_t factor) const {
  if (factor < agent_names.size()) return agent_names[factor];
  return "agent_" + std::to_string(factor + 1);
}

std::string GeneratorSpec::feature_name(std::size_t factor) {
  return "sensitive_" + std::to_string(factor + 1);
}

GeneratorSpec GeneratorSpec::from_json(const nlohmann::json& j) {
  GeneratorSpec s;
  auto normal = [](const nlohmann::json& n) { return Normal{n.at("mean").get<double>(), n.at("stddev").get<double>()}; };
  s.n_users = j.at("n_users").get<std::size_t>();
  s.n_items = j.at("n_items").get<std::size_t>();
  s.k_factors = j.at("k_factors").get<std::size_t>();
  s.k_sensitive = j.at("k_sensitive").get<std::size_t>();
  if (j.contains("default_user_propensity")) s.default_user_propensity = normal(j.at("default_user_propensity"));
  if (j.contains("segments")) {
    for (const auto& seg : j.at("segments")) {
      SegmentSpec segment;
      segment.name = seg.value("name", "");
      segment.size = seg.at("size").get<std::size_t>();
      if (seg.contains("propensities")) {
        for (const auto& p : seg.at("propensities")) {
          segment.propensities.push_back({p.at("factor").get<std::size_t>(), normal(p)});
        }
      }
      s.segments.push_back(std::move(segment));
    }
  }
  s.item_feature_probabilities = j.at("item_feature_probabilities").get<std::vector<double>>();
  s.nonsensitive_item_probability = j.value("nonsensitive_item_probability", 0.5);
  s.factor_sigma = j.value("factor_sigma", 1.0);
  s.ratings_per_user = j.at("ratings_per_user").get<std::size_t>();
  s.list_length = j.at("list_length").get<std::size_t>();
  s.bias_penalty = j.value("bias_penalty", 0.0);
  s.stack_penalty = j.value("stack_penalty", false);
  if (j.contains("agent_names")) s.agent_names = j.at("agent_names").get<std::vector<std::string>>();
  s.seed = j.value("seed", std::uint64_t{0});
  s.validate();
  return s;
}

nlohmann::ordered_json GeneratorSpec::to_json() const {
  auto normal = [](const Normal& n) { return nlohmann::ordered_json{{"mean", n.mean}, {"stddev", n.stddev}}; };
  nlohmann::ordered_json j;
  j["n_users"] = n_users;
  j["n_items"] = n_items;
  j["k_factors"] = k_factors;
  j["k_sensitive"] = k_sensitive;
  j["default_user_propensity"] = normal(default_user_propensity);
  auto segs = nlohmann::ordered_json::array();
  for (const auto& seg : segments) {
    nlohmann::ordered_json js{{"name", seg.name}, {"size", seg.size}};
    auto props = nlohmann::ordered_json::array();
    for (const auto& p : seg.propensities) {
      props.push_back({{"factor", p.factor}, {"mean", p.dist.mean}, {"stddev", p.dist.stddev}});
    }
    js["propensities"] = props;
    segs.push_back(js);
  }
  j["segments"] = segs;
  j["item_feature_probabilities"] = item_feature_probabilities;
  j["nonsensitive_item_probability"] = nonsensitive_item_probability;
  j["factor_sigma"] = factor_sigma;
  j["ratings_per_user"] = ratings_per_user;
  j["list_length"] = list_length;
  j["bias_penalty"] = bias_penalty;
  j["stack_penalty"] = stack_penalty;
  std::vector<std::string> names;
  for (std::size_t f = 0; f < k_sensitive; ++f) names.push_back(agent_name(f));
  j["agent_names"] = names;
  j["seed"] = seed;
  return j;
}

GeneratorSpec GeneratorSpec::three_segment(std::uint64_t seed) {
  GeneratorSpec s;
  s.n_users = 1500;
  s.n_items = 1000;
  s.k_factors = 10;
  s.k_sensitive = 2;
  s.default_user_propensity = {0.5, 0.25};
  // A leans toward the second protected factor, B toward the first, C neither.
  s.segments = {
      {"A", 500, {{0, {0.1, 0.1}}, {1, {0.9, 0.1}}}},
      {"B", 500, {{0, {0.9, 0.1}}, {1, {0.1, 0.1}}}},
      {"C", 500, {{0, {0.5, 0.05}}, {1, {0.5, 0.05}}}},
  };
  s.item_feature_probabilities = {0.1, 0.3};
  s.nonsensitive_item_probability = 0.5;
  s.factor_sigma = 1.0;
  s.ratings_per_user = 200;
  s.list_length = 50;
  s.bias_penalty = 3.0;
  s.agent_names = {"agent_1", "agent_2"};
  s.seed = seed;
  return s;
}

std::string user_id(const GeneratorSpec& spec, std::size_t index) { return padded('u', index, spec.n_users); }
std::string item_id(const GeneratorSpec& spec, std::size_t index) { return padded('i', index, spec.n_items); }

SyntheticUsers generate_users(const GeneratorSpec& spec, Rng& rng) {
  spec.validate();
  std::normal_distribution<double> standard(0.0, 1.0);
  const std::size_t k = spec.k_factors;
  SyntheticUsers users;
  users.propensity = Matrix(spec.n_users, k);
  users.factors = Matrix(spec.n_users, k);
  users.compatibility = Matrix(spec.n_users, spec.k_sensitive);

  std::vector<SegmentSpec> segments = spec.segments;
  if (segments.empty()) segments.push_back({"all", spec.n_users, {}});

  std::size_t u = 0;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    for (std::size_t n = 0; n < segments[s].size; ++n, ++u) {
      users.ids.push_back(user_id(spec, u));
      users.segment.push_back(s);
      for (std::size_t f = 0; f < k; ++f) {
        const auto dist = segments[s].distribution_for(f, spec.default_user_propensity);
        users.propensity(u, f) = dist.mean + dist.stddev * standard(rng);
      }
      for (std::size_t f = 0; f < k; ++f) {
        users.factors(u, f) = users.propensity(u, f) + spec.factor_sigma * standard(rng);
      }
      for (std::size_t f = 0; f < spec.k_sensitive; ++f) {
        users.compatibility(u, f) = std::clamp(users.propensity(u, f), 0.0, 1.0);
      }
    }
  }
  return users;
}

SyntheticItems generate_items(const GeneratorSpec& spec, Rng& rng) {
  spec.validate();
  std::normal_distribution<double> standard(0.0, 1.0);
  const std::size_t k = spec.k_factors;
  SyntheticItems items;
  items.propensity = Matrix(spec.n_items, k);
  items.factors = Matrix(spec.n_items, k);
  for (std::size_t i = 0; i < spec.n_items; ++i) {
    items.ids.push_back(item_id(spec, i));
    for (std::size_t f = 0; f < k; ++f) {
      const double p = f < spec.k_sensitive ? spec.item_feature_probabilities[f] : spec.nonsensitive_item_probability;
      items.propensity(i, f) = uniform_unit(rng) < p ? 1.0 : 0.0;
    }
    for (std::size_t f = 0; f < k; ++f) {
      items.factors(i, f) = items.propensity(i, f) + spec.factor_sigma * standard(rng);
    }
  }
  return items;
}

std::vector<ScoredList> generate_rec_lists(const SyntheticUsers& users, const SyntheticItems& items,
                                           const GeneratorSpec& spec, Rng& rng) {
  if (spec.ratings_per_user > items.ids.size()) {
    throw Error("generator: cannot sample " + std::to_string(spec.ratings_per_user) + " items from " +
                std::to_string(items.ids.size()));
  }
  const std::size_t k = spec.k_factors;
  std::vector<std::size_t> pool(items.ids.size());
  std::vector<ScoredList> lists;
  lists.reserve(users.ids.size());
  for (std::size_t u = 0; u < users.ids.size(); ++u) {
    std::iota(pool.begin(), pool.end(), 0);
    // Partial Fisher-Yates: the first m slots become a uniform sample.
    for (std::size_t i = 0; i < spec.ratings_per_user; ++i) {
      const std::size_t span = pool.size() - i;
      const std::size_t j = i + static_cast<std::size_t>(uniform_unit(rng) * static_cast<double>(span));
      std::swap(pool[i], pool[std::min(j, pool.size() - 1)]);
    }
    std::vector<ScoredItem> rated;
    rated.reserve(spec.ratings_per_user);
    for (std::size_t i = 0; i < spec.ratings_per_user; ++i) {
      const std::size_t item = pool[i];
      double rating = 0.0;
      for (std::size_t f = 0; f < k; ++f) rating += users.factors(u, f) * items.factors(item, f);
      std::size_t sensitive = 0;
      for (std::size_t f = 0; f < spec.k_sensitive; ++f) sensitive += items.is_sensitive(item, f) ? 1 : 0;
      if (sensitive > 0) rating -= spec.bias_penalty * (spec.stack_penalty ? static_cast<double>(sensitive) : 1.0);
      rated.push_back({items.ids[item], rating});
    }
    lists.push_back(ScoredList::sorted(std::move(rated)).top(spec.list_length));
  }
  return lists;
}

std::vector<std::string> arrival_order(const GeneratorSpec& spec) {
  std::vector<std::string> order;
  if (spec.segments.empty()) {
    for (std::size_t u = 0; u < spec.n_users; ++u) order.push_back(user_id(spec, u));
    return order;
  }
  std::size_t total = 0;
  for (const auto& s : spec.segments) total += s.size;
  if (total != spec.n_users) {
    throw Error("arrival order: segment sizes sum to " + std::to_string(total) + ", expected " +
                std::to_string(spec.n_users));
  }
  std::size_t u = 0;
  for (const auto& s : spec.segments) {
    for (std::size_t n = 0; n < s.size; ++n) order.push_back(user_id(spec, u++));
  }
  return order;
}

SyntheticDataset generate(const GeneratorSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  SyntheticDataset d;
  d.spec = spec;
  d.users = generate_users(spec, rng);
  d.items = generate_items(spec, rng);
  d.rec_lists = generate_rec_lists(d.users, d.items, spec, rng);
  d.arrivals = arrival_order(spec);
  return d;
}

void write_dataset(const SyntheticDataset& data, const std::filesystem::path& dir) {
  const auto& spec = data.spec;
  std::filesystem::create_directories(dir);

  std::ostringstream items;
  items << "# item_id\tfeature\tvalue\n";
  for (std::size_t i = 0; i < data.items.ids.size(); ++i) {
    for (std::size_t f = 0; f < spec.k_sensitive; ++f) {
      items << data.items.ids[i] << '\t' << GeneratorSpec::feature_name(f) << '\t'
            << (data.items.is_sensitive(i, f) ? "1" : "0") << '\n';
    }
    if (spec.k_sensitive == 0) items << data.items.ids[i] << "\tkind\tsynthetic\n";
  }
  write_file(dir / "items.tsv", items.str());

  std::ostringstream lists;
  lists << "# user_id\titem_id\tscore\n";
  for (std::size_t u = 0; u < data.users.ids.size(); ++u) {
    for (const auto& e : data.rec_lists[u]) {
      lists << data.users.ids[u] << '\t' << e.item_id << '\t' << format_double(e.score) << '\n';
    }
  }
  write_file(dir / "reclists.tsv", lists.str());

  std::ostringstream compat;
  compat << "# user_id\tagent_name\tvalue\n";
  for (std::size_t u = 0; u < data.users.ids.size(); ++u) {
    for (std::size_t f = 0; f < spec.k_sensitive; ++f) {
      compat << data.users.ids[u] << '\t' << spec.agent_name(f) << '\t'
             << format_double(data.users.compatibility(u, f)) << '\n';
    }
  }
  write_file(dir / "compat.tsv", compat.str());

  std::ostringstream arrivals;
  for (const auto& id : data.arrivals) arrivals << id << '\n';
  write_file(dir / "arrivals.txt", arrivals.str());

  nlohmann::ordered_json manifest;
  manifest["generator"] = spec.to_json();
  manifest["seed"] = spec.seed;
  manifest["files"] = {"items.tsv", "reclists.tsv", "compat.tsv", "arrivals.txt"};
  manifest["counts"] = {{"users", data.users.ids.size()}, {"items", data.items.ids.size()}};
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace scruf::synthetic
