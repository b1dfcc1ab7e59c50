#ifndef WSCHED_CLI_EMIT_HPP
#define WSCHED_CLI_EMIT_HPP

// Output files. Column sets are fixed:
//
// final.csv   config,label,scheduler,V,replication,seed,slots,users,
//             Dbar,pbar,mubar,fbar,Dbar_sum,fbar_sum,mubar_throughput_sum,
//             total_cost,B,B_alt,gap_bound,queue_avg,backlog_q2,backlog_h2,
//             backlog_bounded
//             One row per (config, replication). Dbar..fbar hold one value
//             per user, ';'-separated, in user order.
// trace.csv   config,replication,t,user,Qlen,head_ttl,X,Z_or_y,Dbar,pbar,
//             mubar,fbar
//             One row per user every trace_every slots (and at the horizon).
//             X is empty for LDF; Z_or_y is Z for DPC throughput users
//             (empty for deadline users) and the debt y for LDF.
// plotdata_*  Replication means shaped for each preset's figure axes.
// configs.json  Every config with defaults filled in.
//
// Users are numbered from 1 in all files. Numbers use the shortest
// round-trip decimal form; NaN and missing values are written as empty
// cells (CSV) or null (JSON).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "wsched/cli/batch.hpp"
#include "wsched/cli/presets.hpp"

namespace wsched::cli {

enum class Format { Csv, Json };

std::optional<Format> parse_format(const std::string& name);

using Cell = std::variant<std::monostate, std::int64_t, double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  bool operator==(const Table&) const = default;
};

extern const std::vector<std::string> kFinalColumns;
extern const std::vector<std::string> kTraceColumns;

Table final_table(const std::vector<ExperimentConfig>& configs,
                  const std::vector<RunOutput>& outputs);
Table trace_table(const std::vector<RunOutput>& outputs);

struct NamedTable {
  std::string name;
  Table table;
};

/// plotdata_series plus the preset-specific figure tables.
std::vector<NamedTable> plot_tables(Preset preset,
                                    const std::vector<ExperimentConfig>& configs,
                                    const std::vector<RunOutput>& outputs);

std::string to_csv(const Table& table);
nlohmann::json to_json(const Table& table);
/// Inverse of to_json. Throws std::runtime_error on a malformed document.
Table table_from_json(const nlohmann::json& doc);
Table read_table_json(const std::filesystem::path& path);

/// Writes every output file into out_dir (created if needed) and returns
/// the paths written. Throws std::runtime_error naming the path on I/O
/// failure.
std::vector<std::filesystem::path> emit(Preset preset,
                                        const std::vector<ExperimentConfig>& configs,
                                        const std::vector<RunOutput>& outputs,
                                        Format format,
                                        const std::filesystem::path& out_dir);

}  // namespace wsched::cli

#endif  // WSCHED_CLI_EMIT_HPP
