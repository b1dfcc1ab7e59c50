#include "wsched/cli/emit.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

#include "wsched/cli/config.hpp"

namespace wsched::cli {

namespace {

using json = nlohmann::json;

Cell number(double v) {
  if (std::isnan(v)) return std::monostate{};
  return v;
}

Cell integer(std::int64_t v) { return v; }

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ';';
    out += format_double(values[i]);
  }
  return out;
}

std::string csv_field(const Cell& cell) {
  struct Visitor {
    std::string operator()(std::monostate) const { return {}; }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const { return format_double(v); }
    std::string operator()(const std::string& s) const {
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string quoted = "\"";
      for (char c : s) {
        if (c == '"') quoted += '"';
        quoted += c;
      }
      return quoted + "\"";
    }
  };
  return std::visit(Visitor{}, cell);
}

json cell_to_json(const Cell& cell) {
  struct Visitor {
    json operator()(std::monostate) const { return nullptr; }
    json operator()(std::int64_t v) const { return v; }
    json operator()(double v) const { return v; }
    json operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{}, cell);
}

Cell cell_from_json(const json& j) {
  if (j.is_null()) return std::monostate{};
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number_float()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw std::runtime_error("unsupported JSON cell type");
}

std::size_t throughput_users(const ExperimentConfig& c) {
  std::size_t k = 0;
  for (const UserSpec& s : c.specs) k += s.is_throughput() ? 1 : 0;
  return k;
}

int first_deadline(const ExperimentConfig& c) {
  for (const UserSpec& s : c.specs) {
    if (s.is_deadline()) return s.deadline();
  }
  return 0;
}

double v_or_nan(const ExperimentConfig& c) {
  return c.scheduler.kind == SchedulerKind::Dpc
             ? c.scheduler.V
             : std::numeric_limits<double>::quiet_NaN();
}

/// Replication mean of final per-user averages, per config.
struct ConfigMeans {
  std::vector<UserAverages> users;
  std::int64_t replications = 0;
};

std::vector<ConfigMeans> config_means(const std::vector<ExperimentConfig>& configs,
                                      const std::vector<RunOutput>& outputs) {
  std::vector<ConfigMeans> means(configs.size());
  for (std::size_t c = 0; c < configs.size(); ++c) {
    means[c].users.resize(configs[c].specs.size());
  }
  for (const RunOutput& o : outputs) {
    ConfigMeans& m = means[o.config_index];
    ++m.replications;
    for (std::size_t i = 0; i < o.result.users.size(); ++i) {
      m.users[i].drop_rate += o.result.users[i].drop_rate;
      m.users[i].avg_power += o.result.users[i].avg_power;
      m.users[i].throughput += o.result.users[i].throughput;
      m.users[i].avg_urgency += o.result.users[i].avg_urgency;
    }
  }
  for (ConfigMeans& m : means) {
    if (m.replications == 0) continue;
    const double n = static_cast<double>(m.replications);
    for (UserAverages& u : m.users) {
      u.drop_rate /= n;
      u.avg_power /= n;
      u.throughput /= n;
      u.avg_urgency /= n;
    }
  }
  return means;
}

struct SeriesPoint {
  double drop_rate = 0.0;
  double avg_power = 0.0;
  double throughput = 0.0;
  double avg_urgency = 0.0;
  std::int64_t count = 0;
};

/// (config, t, user) -> replication mean of trace rows.
using SeriesMap =
    std::map<std::tuple<std::size_t, std::int64_t, std::size_t>, SeriesPoint>;

SeriesMap series_means(const std::vector<RunOutput>& outputs) {
  SeriesMap series;
  for (const RunOutput& o : outputs) {
    for (const TraceRow& r : o.result.trace) {
      SeriesPoint& p = series[{o.config_index, r.t, r.user}];
      p.drop_rate += r.drop_rate;
      p.avg_power += r.avg_power;
      p.throughput += r.throughput;
      p.avg_urgency += r.avg_urgency;
      ++p.count;
    }
  }
  for (auto& [key, p] : series) {
    const double n = static_cast<double>(p.count);
    p.drop_rate /= n;
    p.avg_power /= n;
    p.throughput /= n;
    p.avg_urgency /= n;
  }
  return series;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

std::optional<Format> parse_format(const std::string& name) {
  if (name == "csv") return Format::Csv;
  if (name == "json") return Format::Json;
  return std::nullopt;
}

const std::vector<std::string> kFinalColumns = {
    "config", "label", "scheduler", "V", "replication", "seed", "slots", "users",
    "Dbar", "pbar", "mubar", "fbar", "Dbar_sum", "fbar_sum",
    "mubar_throughput_sum", "total_cost", "B", "B_alt", "gap_bound", "queue_avg",
    "backlog_q2", "backlog_h2", "backlog_bounded"};

const std::vector<std::string> kTraceColumns = {
    "config", "replication", "t", "user", "Qlen", "head_ttl",
    "X", "Z_or_y", "Dbar", "pbar", "mubar", "fbar"};

Table final_table(const std::vector<ExperimentConfig>& configs,
                  const std::vector<RunOutput>& outputs) {
  Table t{kFinalColumns, {}};
  for (const RunOutput& o : outputs) {
    const ExperimentConfig& c = configs[o.config_index];
    const RunResult& r = o.result;
    std::vector<double> dbar, pbar, mubar, fbar;
    double dbar_sum = 0.0, fbar_sum = 0.0, mu_sum = 0.0;
    for (std::size_t i = 0; i < r.users.size(); ++i) {
      const UserAverages& u = r.users[i];
      dbar.push_back(u.drop_rate);
      pbar.push_back(u.avg_power);
      mubar.push_back(u.throughput);
      fbar.push_back(u.avg_urgency);
      if (c.specs[i].is_deadline()) {
        dbar_sum += u.drop_rate;
        fbar_sum += u.avg_urgency;
      } else {
        mu_sum += u.throughput;
      }
    }
    const BoundReport& b = o.report;
    t.rows.push_back({integer(static_cast<std::int64_t>(o.config_index)), c.label,
                      to_string(c.scheduler.kind), number(v_or_nan(c)),
                      integer(static_cast<std::int64_t>(r.replication)),
                      integer(static_cast<std::int64_t>(c.seed)), integer(r.slots),
                      integer(static_cast<std::int64_t>(c.specs.size())), join(dbar),
                      join(pbar), join(mubar), join(fbar), number(dbar_sum),
                      number(fbar_sum), number(mu_sum), number(r.total_cost),
                      number(b.B), number(b.B_alternative), number(b.gap_bound),
                      number(b.queue_avg), number(b.backlog_second_quarter),
                      number(b.backlog_second_half),
                      integer(b.backlog_bounded ? 1 : 0)});
  }
  return t;
}

Table trace_table(const std::vector<RunOutput>& outputs) {
  Table t{kTraceColumns, {}};
  for (const RunOutput& o : outputs) {
    for (const TraceRow& r : o.result.trace) {
      t.rows.push_back({integer(static_cast<std::int64_t>(o.config_index)),
                        integer(static_cast<std::int64_t>(o.result.replication)),
                        integer(r.t), integer(static_cast<std::int64_t>(r.user + 1)),
                        integer(static_cast<std::int64_t>(r.queue_length)),
                        integer(r.head_ttl), number(r.power_backlog),
                        number(r.secondary_state), number(r.drop_rate),
                        number(r.avg_power), number(r.throughput),
                        number(r.avg_urgency)});
    }
  }
  return t;
}

std::vector<NamedTable> plot_tables(Preset preset,
                                    const std::vector<ExperimentConfig>& configs,
                                    const std::vector<RunOutput>& outputs) {
  const SeriesMap series = series_means(outputs);
  const std::vector<ConfigMeans> means = config_means(configs, outputs);
  std::vector<NamedTable> tables;

  Table generic{{"config", "label", "t", "user", "Dbar_mean", "pbar_mean",
                 "mubar_mean", "fbar_mean", "replications"},
                {}};
  for (const auto& [key, p] : series) {
    const auto& [c, t, user] = key;
    generic.rows.push_back({integer(static_cast<std::int64_t>(c)), configs[c].label,
                            integer(t), integer(static_cast<std::int64_t>(user + 1)),
                            number(p.drop_rate), number(p.avg_power),
                            number(p.throughput), number(p.avg_urgency),
                            integer(p.count)});
  }
  tables.push_back({"plotdata_series", std::move(generic)});

  switch (preset) {
    case Preset::Fig2Tradeoff: {
      Table convergence{{"V", "t", "mubar_2", "pbar_1"}, {}};
      for (const auto& [key, p] : series) {
        const auto& [c, t, user] = key;
        if (user != 0) continue;
        const auto other = series.find({c, t, 1});
        const double mu2 = other == series.end() ? std::nan("") : other->second.throughput;
        convergence.rows.push_back(
            {number(v_or_nan(configs[c])), integer(t), number(mu2), number(p.avg_power)});
      }
      Table tradeoff{{"V", "Dbar_1", "pbar_1", "mubar_2", "replications"}, {}};
      for (std::size_t c = 0; c < configs.size(); ++c) {
        if (means[c].replications == 0 || means[c].users.size() < 2) continue;
        tradeoff.rows.push_back({number(v_or_nan(configs[c])),
                                 number(means[c].users[0].drop_rate),
                                 number(means[c].users[0].avg_power),
                                 number(means[c].users[1].throughput),
                                 integer(means[c].replications)});
      }
      tables.push_back({"plotdata_fig2_convergence", std::move(convergence)});
      tables.push_back({"plotdata_fig2_tradeoff", std::move(tradeoff)});
      break;
    }
    case Preset::Fig3DropRate:
    case Preset::Fig4Throughput: {
      const bool drops = preset == Preset::Fig3DropRate;
      Table fig{{"m", "K", "scheduler", "V", drops ? "Dbar_1" : "throughput_total",
                 "replications"},
                {}};
      for (std::size_t c = 0; c < configs.size(); ++c) {
        if (means[c].replications == 0) continue;
        double value = 0.0;
        for (std::size_t i = 0; i < configs[c].specs.size(); ++i) {
          const bool deadline = configs[c].specs[i].is_deadline();
          if (drops && deadline) value += means[c].users[i].drop_rate;
          if (!drops && !deadline) value += means[c].users[i].throughput;
        }
        fig.rows.push_back({integer(first_deadline(configs[c])),
                            integer(static_cast<std::int64_t>(throughput_users(configs[c]))),
                            to_string(configs[c].scheduler.kind),
                            number(v_or_nan(configs[c])), number(value),
                            integer(means[c].replications)});
      }
      tables.push_back({drops ? "plotdata_fig3_droprate" : "plotdata_fig4_throughput",
                        std::move(fig)});
      break;
    }
    case Preset::Fig5Convergence: {
      Table fig{{"scheduler", "t", "mubar_2"}, {}};
      for (const auto& [key, p] : series) {
        const auto& [c, t, user] = key;
        if (user != 1) continue;
        fig.rows.push_back(
            {to_string(configs[c].scheduler.kind), integer(t), number(p.throughput)});
      }
      tables.push_back({"plotdata_fig5_convergence", std::move(fig)});
      break;
    }
    case Preset::Custom:
      break;
  }
  return tables;
}

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += table.columns[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_field(row[i]);
    }
    out += '\n';
  }
  return out;
}

json to_json(const Table& table) {
  json rows = json::array();
  for (const auto& row : table.rows) {
    json r = json::array();
    for (const Cell& cell : row) r.push_back(cell_to_json(cell));
    rows.push_back(std::move(r));
  }
  return json{{"columns", table.columns}, {"rows", std::move(rows)}};
}

Table table_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("columns") || !doc.contains("rows")) {
    throw std::runtime_error("table JSON needs 'columns' and 'rows'");
  }
  Table t;
  t.columns = doc.at("columns").get<std::vector<std::string>>();
  for (const json& r : doc.at("rows")) {
    if (!r.is_array() || r.size() != t.columns.size()) {
      throw std::runtime_error("table row does not match the column count");
    }
    std::vector<Cell> row;
    for (const json& cell : r) row.push_back(cell_from_json(cell));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table read_table_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return table_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

std::vector<std::filesystem::path> emit(Preset preset,
                                        const std::vector<ExperimentConfig>& configs,
                                        const std::vector<RunOutput>& outputs,
                                        Format format,
                                        const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw std::runtime_error("cannot create " + out_dir.string() + ": " + ec.message());
  }

  std::vector<NamedTable> tables;
  tables.push_back({"final", final_table(configs, outputs)});
  tables.push_back({"trace", trace_table(outputs)});
  for (NamedTable& t : plot_tables(preset, configs, outputs)) tables.push_back(std::move(t));

  std::vector<std::filesystem::path> written;
  for (const NamedTable& t : tables) {
    const auto path =
        out_dir / (t.name + (format == Format::Csv ? ".csv" : ".json"));
    write_text(path, format == Format::Csv ? to_csv(t.table)
                                           : to_json(t.table).dump(1) + "\n");
    written.push_back(path);
  }

  json echo{{"preset", to_string(preset)}, {"configs", json::array()}};
  for (const ExperimentConfig& c : configs) echo["configs"].push_back(config_to_json(c));
  const auto echo_path = out_dir / "configs.json";
  write_text(echo_path, echo.dump(2) + "\n");
  written.push_back(echo_path);
  return written;
}

}  // namespace wsched::cli
