#ifndef WSCHED_CLI_CONFIG_HPP
#define WSCHED_CLI_CONFIG_HPP

// Experiment configuration files.
//
// Text form: `key = value` lines grouped in sections. Each [experiment]
// section starts a new configuration; the [user] sections after it add
// users to that configuration in order. `#` starts a comment.
//
//   [experiment]
//   label = two-user
//   scheduler = dpc        # dpc | ldf
//   v = 100
//   slots = 100000
//   seed = 1
//   replications = 20
//   trace_every = 1000
//   p_low = 1
//   p_high = 2
//
//   [user]
//   role = deadline        # deadline | throughput
//   arrival_prob = 0.5
//   deadline = 10
//   gamma = 0.7
//   good_prob = 0.4
//
//   [user]
//   role = throughput
//   delta = 0.4
//   gamma = 0.65
//   good_prob = 0.4
//
// JSON form: one object with the same experiment keys plus "users": [...],
// or {"configs": [ ... ]} holding several such objects.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "wsched/engine.hpp"

namespace wsched::cli {

/// Command-line values that replace the corresponding config fields.
struct Overrides {
  std::optional<SchedulerKind> scheduler;
  std::optional<double> v;
  std::optional<std::int64_t> slots;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> replications;
  std::optional<std::int64_t> trace_every;
};

std::vector<ExperimentConfig> parse_config_text(const std::string& text);
std::vector<ExperimentConfig> parse_config_json(const nlohmann::json& doc);

/// Reads a config file, picking the JSON parser when the content starts
/// with '{'. Throws ConfigError on I/O, syntax or validation failure.
std::vector<ExperimentConfig> load_config_file(const std::filesystem::path& path);

void apply_overrides(std::vector<ExperimentConfig>& configs,
                     const Overrides& overrides);

/// JSON object in the config-file schema with every default filled in.
nlohmann::json config_to_json(const ExperimentConfig& config);

bool same_config(const ExperimentConfig& a, const ExperimentConfig& b);

}  // namespace wsched::cli

#endif  // WSCHED_CLI_CONFIG_HPP
