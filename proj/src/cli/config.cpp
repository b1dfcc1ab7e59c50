#include "wsched/cli/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace wsched::cli {

namespace {

using json = nlohmann::json;

struct Entry {
  std::string key;
  std::string value;
  std::string where;
};

struct RawSection {
  std::string name;  // "experiment" or "user"
  std::string where;  // for messages
  std::vector<Entry> entries;
};

const std::set<std::string> kExperimentKeys = {
    "label", "scheduler", "v", "slots", "seed", "replications",
    "trace_every", "p_low", "p_high"};
const std::set<std::string> kUserKeys = {"role", "arrival_prob", "deadline",
                                         "gamma", "delta", "good_prob"};

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(const std::string& where, const std::string& message) {
  throw ConfigError(where + ": " + message);
}

double to_double(const std::string& where, const std::string& key,
                 const std::string& text) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    fail(where, "key '" + key + "' expects a number, got '" + text + "'");
  }
  return value;
}

template <typename Int>
Int to_integer(const std::string& where, const std::string& key,
               const std::string& text) {
  Int value = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    fail(where, "key '" + key + "' expects an integer, got '" + text + "'");
  }
  return value;
}

std::map<std::string, std::string> collect(const RawSection& section,
                                           const std::set<std::string>& allowed) {
  std::map<std::string, std::string> out;
  for (const Entry& e : section.entries) {
    if (!allowed.count(e.key)) {
      fail(e.where, "unknown key '" + e.key + "' in [" + section.name + "]");
    }
    if (!out.emplace(e.key, e.value).second) {
      fail(e.where, "duplicate key '" + e.key + "'");
    }
  }
  return out;
}

UserSpec build_user(const RawSection& section) {
  const auto kv = collect(section, kUserKeys);
  const auto get = [&](const std::string& key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };

  UserSpec spec;
  const std::string* role = get("role");
  if (!role) fail(section.where, "missing required key 'role'");
  if (*role == "deadline") {
    spec.role = UserRole::Deadline;
  } else if (*role == "throughput") {
    spec.role = UserRole::Throughput;
  } else {
    fail(section.where, "key 'role' must be 'deadline' or 'throughput'");
  }
  if (const auto* v = get("gamma")) {
    spec.gamma = to_double(section.where, "gamma", *v);
  } else {
    fail(section.where, "missing required key 'gamma'");
  }
  if (const auto* v = get("good_prob")) {
    spec.good_prob = to_double(section.where, "good_prob", *v);
  } else {
    fail(section.where, "missing required key 'good_prob'");
  }
  if (const auto* v = get("arrival_prob")) {
    spec.arrival_prob = to_double(section.where, "arrival_prob", *v);
  }
  if (const auto* v = get("deadline")) {
    spec.deadline_slots = to_integer<int>(section.where, "deadline", *v);
  }
  if (const auto* v = get("delta")) {
    spec.delta = to_double(section.where, "delta", *v);
  }
  return spec;
}

std::vector<ExperimentConfig> build_configs(const std::vector<RawSection>& sections) {
  std::vector<ExperimentConfig> configs;
  for (const RawSection& section : sections) {
    if (section.name == "user") {
      if (configs.empty()) {
        fail(section.where, "[user] section before any [experiment] section");
      }
      configs.back().specs.push_back(build_user(section));
      continue;
    }
    if (section.name != "experiment") {
      fail(section.where, "unknown section [" + section.name + "]");
    }

    const auto kv = collect(section, kExperimentKeys);
    ExperimentConfig c;
    c.label = "custom";
    double p_low = 1.0;
    double p_high = 2.0;
    for (const auto& [key, value] : kv) {
      if (key == "label") {
        c.label = value;
      } else if (key == "scheduler") {
        const auto kind = parse_scheduler_kind(value);
        if (!kind) fail(section.where, "key 'scheduler' must be 'dpc' or 'ldf'");
        c.scheduler.kind = *kind;
      } else if (key == "v") {
        c.scheduler.V = to_double(section.where, key, value);
      } else if (key == "slots") {
        c.horizon = to_integer<std::int64_t>(section.where, key, value);
      } else if (key == "seed") {
        c.seed = to_integer<std::uint64_t>(section.where, key, value);
      } else if (key == "replications") {
        c.replications = to_integer<std::int64_t>(section.where, key, value);
      } else if (key == "trace_every") {
        c.trace_every = to_integer<std::int64_t>(section.where, key, value);
      } else if (key == "p_low") {
        p_low = to_double(section.where, key, value);
      } else if (key == "p_high") {
        p_high = to_double(section.where, key, value);
      }
    }
    try {
      c.levels = PowerLevels(p_low, p_high);
    } catch (const std::invalid_argument& e) {
      fail(section.where, e.what());
    }
    configs.push_back(std::move(c));
  }
  if (configs.empty()) throw ConfigError("config defines no [experiment]");
  for (std::size_t k = 0; k < configs.size(); ++k) {
    if (configs[k].specs.empty()) {
      throw ConfigError("experiment " + std::to_string(k + 1) + " has no users");
    }
    try {
      validate(configs[k]);
    } catch (const ConfigError& e) {
      throw ConfigError("experiment " + std::to_string(k + 1) + ": " + e.what());
    }
  }
  return configs;
}

std::string json_scalar(const json& value, const std::string& where,
                        const std::string& key) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number()) return value.dump();
  fail(where, "key '" + key + "' must be a string or a number");
}

RawSection json_section(const json& obj, const std::string& name,
                        const std::string& where) {
  if (!obj.is_object()) fail(where, "expected a JSON object");
  RawSection section{name, where, {}};
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (name == "experiment" && it.key() == "users") continue;
    section.entries.push_back({it.key(), json_scalar(it.value(), where, it.key()), where});
  }
  return section;
}

}  // namespace

std::vector<ExperimentConfig> parse_config_text(const std::string& text) {
  std::vector<RawSection> sections;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = "line " + std::to_string(line_no);
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(where, "malformed section header");
      sections.push_back({trim(line.substr(1, line.size() - 2)), where, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(where, "expected 'key = value'");
    if (sections.empty()) fail(where, "key outside of any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(where, "empty key");
    sections.back().entries.push_back({key, value, where});
  }
  return build_configs(sections);
}

std::vector<ExperimentConfig> parse_config_json(const json& doc) {
  std::vector<json> experiments;
  if (doc.is_object() && doc.contains("configs")) {
    // "preset" is written by the output echo and ignored here.
    for (auto it = doc.begin(); it != doc.end(); ++it) {
      if (it.key() != "configs" && it.key() != "preset") {
        throw ConfigError("unknown key '" + it.key() + "' next to 'configs'");
      }
    }
    if (!doc["configs"].is_array()) throw ConfigError("'configs' must be an array");
    for (const json& c : doc["configs"]) experiments.push_back(c);
  } else {
    experiments.push_back(doc);
  }

  std::vector<RawSection> sections;
  for (std::size_t k = 0; k < experiments.size(); ++k) {
    const std::string where = "configs[" + std::to_string(k) + "]";
    const json& e = experiments[k];
    sections.push_back(json_section(e, "experiment", where));
    if (!e.contains("users") || !e["users"].is_array()) {
      fail(where, "missing 'users' array");
    }
    for (std::size_t u = 0; u < e["users"].size(); ++u) {
      sections.push_back(json_section(e["users"][u], "user",
                                      where + ".users[" + std::to_string(u) + "]"));
    }
  }
  return build_configs(sections);
}

std::vector<ExperimentConfig> load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError(path.string() + ": " + e.what());
    }
    return parse_config_json(doc);
  }
  return parse_config_text(text);
}

void apply_overrides(std::vector<ExperimentConfig>& configs,
                     const Overrides& o) {
  for (ExperimentConfig& c : configs) {
    if (o.scheduler) c.scheduler.kind = *o.scheduler;
    if (o.v) c.scheduler.V = *o.v;
    if (o.slots) c.horizon = *o.slots;
    if (o.seed) c.seed = *o.seed;
    if (o.replications) c.replications = *o.replications;
    if (o.trace_every) c.trace_every = *o.trace_every;
  }
}

json config_to_json(const ExperimentConfig& c) {
  json users = json::array();
  for (const UserSpec& s : c.specs) {
    json u;
    u["role"] = to_string(s.role);
    if (s.arrival_prob) u["arrival_prob"] = *s.arrival_prob;
    if (s.deadline_slots) u["deadline"] = *s.deadline_slots;
    if (s.delta) u["delta"] = *s.delta;
    u["gamma"] = s.gamma;
    u["good_prob"] = s.good_prob;
    users.push_back(std::move(u));
  }
  json j;
  j["label"] = c.label;
  j["scheduler"] = to_string(c.scheduler.kind);
  j["v"] = c.scheduler.V;
  j["slots"] = c.horizon;
  j["seed"] = c.seed;
  j["replications"] = c.replications;
  j["trace_every"] = c.trace_every;
  j["p_low"] = c.levels.low();
  j["p_high"] = c.levels.high();
  j["users"] = std::move(users);
  return j;
}

bool same_config(const ExperimentConfig& a, const ExperimentConfig& b) {
  return config_to_json(a) == config_to_json(b);
}

}  // namespace wsched::cli
