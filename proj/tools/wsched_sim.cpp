// wsched_sim: run scheduling experiments and write plot-ready outputs.
//
//   wsched_sim --preset fig2-tradeoff --out results/fig2
//   wsched_sim --config my.cfg --scheduler ldf --slots 20000 --format json

#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "wsched/cli/batch.hpp"
#include "wsched/cli/config.hpp"
#include "wsched/cli/emit.hpp"
#include "wsched/cli/presets.hpp"

using namespace wsched;
using namespace wsched::cli;

int main(int argc, char** argv) {
  CLI::App app{"Slotted wireless scheduling simulator (DPC and LDF)"};

  std::string preset_name;
  std::string config_path;
  std::string scheduler_name;
  std::string format_name = "csv";
  std::string out_dir = "out";
  unsigned threads = 0;
  Overrides overrides;

  app.add_option("--preset", preset_name,
                 "fig2-tradeoff | fig3-droprate | fig4-throughput | "
                 "fig5-convergence | custom");
  app.add_option("--config", config_path, "Config file (text or JSON)");
  app.add_option("--scheduler", scheduler_name, "Override scheduler: dpc | ldf");
  app.add_option("--v", overrides.v, "Override the DPC weight V");
  app.add_option("--slots", overrides.slots, "Override the horizon in slots");
  app.add_option("--seed", overrides.seed, "Override the experiment seed");
  app.add_option("--replications", overrides.replications,
                 "Override the replication count");
  app.add_option("--trace-every", overrides.trace_every,
                 "Override the trace stride in slots");
  app.add_option("--format", format_name, "Output format: csv | json");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--threads", threads, "Worker threads (0 = all cores)");

  CLI11_PARSE(app, argc, argv);

  try {
    Preset preset = Preset::Custom;
    if (!preset_name.empty()) {
      const auto p = parse_preset(preset_name);
      if (!p) throw ConfigError("unknown preset '" + preset_name + "'");
      preset = *p;
    } else if (config_path.empty()) {
      throw ConfigError("one of --preset or --config is required");
    }
    if (preset != Preset::Custom && !config_path.empty()) {
      throw ConfigError("--config can only be combined with --preset custom");
    }
    if (!scheduler_name.empty()) {
      overrides.scheduler = parse_scheduler_kind(scheduler_name);
      if (!overrides.scheduler) {
        throw ConfigError("--scheduler must be 'dpc' or 'ldf'");
      }
    }
    const auto format = parse_format(format_name);
    if (!format) throw ConfigError("--format must be 'csv' or 'json'");

    std::vector<ExperimentConfig> configs =
        preset == Preset::Custom ? load_config_file(config_path) : expand_preset(preset);
    apply_overrides(configs, overrides);
    for (std::size_t k = 0; k < configs.size(); ++k) {
      for (const std::string& w : validate(configs[k])) {
        std::cerr << "warning: " << configs[k].label << ": " << w << "\n";
      }
    }

    const auto outputs = run_batch(configs, threads);
    const auto written = emit(preset, configs, outputs, *format, out_dir);

    for (std::size_t c = 0; c < configs.size(); ++c) {
      double dbar = 0.0, mu = 0.0;
      std::int64_t n = 0;
      for (const RunOutput& o : outputs) {
        if (o.config_index != c) continue;
        ++n;
        for (std::size_t i = 0; i < configs[c].specs.size(); ++i) {
          if (configs[c].specs[i].is_deadline()) {
            dbar += o.result.users[i].drop_rate;
          } else {
            mu += o.result.users[i].throughput;
          }
        }
      }
      if (n == 0) continue;
      std::printf("%-28s  mean Dbar_sum %.5f  mean throughput_sum %.5f  (%lld reps)\n",
                  configs[c].label.c_str(), dbar / n, mu / n,
                  static_cast<long long>(n));
    }
    for (const auto& p : written) std::printf("wrote %s\n", p.string().c_str());
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
