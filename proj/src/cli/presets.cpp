#include "wsched/cli/presets.hpp"

namespace wsched::cli {

namespace {

constexpr std::int64_t kSlots = 100000;
constexpr std::int64_t kReplications = 20;
constexpr std::uint64_t kSeed = 1;

ExperimentConfig base_config(std::string label) {
  ExperimentConfig c;
  c.label = std::move(label);
  c.levels = PowerLevels(1.0, 2.0);
  c.horizon = kSlots;
  c.replications = kReplications;
  c.seed = kSeed;
  c.trace_every = 1000;
  return c;
}

std::string scheduler_label(const SchedulerSpec& s) {
  if (s.kind == SchedulerKind::Ldf) return "ldf";
  std::string v = std::to_string(s.V);
  v.erase(v.find_last_not_of('0') + 1);
  if (v.back() == '.') v.pop_back();
  return "dpc V=" + v;
}

std::vector<ExperimentConfig> multiuser_grid(const std::string& prefix) {
  std::vector<ExperimentConfig> out;
  for (int m : {10, 30}) {
    for (int k = 1; k <= 6; ++k) {
      for (SchedulerSpec s : {SchedulerSpec{SchedulerKind::Dpc, kDefaultV},
                              SchedulerSpec{SchedulerKind::Ldf, kDefaultV}}) {
        ExperimentConfig c = multiuser_config(m, k, s);
        c.label = prefix + " m=" + std::to_string(m) + " K=" + std::to_string(k) +
                  " " + scheduler_label(s);
        out.push_back(std::move(c));
      }
    }
  }
  return out;
}

}  // namespace

std::string to_string(Preset preset) {
  switch (preset) {
    case Preset::Fig2Tradeoff: return "fig2-tradeoff";
    case Preset::Fig3DropRate: return "fig3-droprate";
    case Preset::Fig4Throughput: return "fig4-throughput";
    case Preset::Fig5Convergence: return "fig5-convergence";
    case Preset::Custom: return "custom";
  }
  return "custom";
}

std::optional<Preset> parse_preset(const std::string& name) {
  for (Preset p : {Preset::Fig2Tradeoff, Preset::Fig3DropRate, Preset::Fig4Throughput,
                   Preset::Fig5Convergence, Preset::Custom}) {
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

ExperimentConfig fig2_config(double V) {
  ExperimentConfig c = base_config("fig2 " + scheduler_label({SchedulerKind::Dpc, V}));
  c.specs = {UserSpec::deadline_user(0.5, 10, 0.7, 0.4),
             UserSpec::throughput_user(0.4, 0.65, 0.4)};
  c.scheduler = {SchedulerKind::Dpc, V};
  return c;
}

ExperimentConfig multiuser_config(int deadline, int throughput_users,
                                  SchedulerSpec scheduler) {
  ExperimentConfig c = base_config("multiuser");
  c.specs.push_back(UserSpec::deadline_user(0.35, deadline, 2.0, 0.9));
  for (int k = 0; k < throughput_users; ++k) {
    c.specs.push_back(UserSpec::throughput_user(kMultiuserDelta, 2.0, 0.9));
  }
  c.scheduler = scheduler;
  return c;
}

std::vector<ExperimentConfig> expand_preset(Preset preset) {
  switch (preset) {
    case Preset::Fig2Tradeoff:
      return {fig2_config(10.0), fig2_config(100.0), fig2_config(1000.0)};
    case Preset::Fig3DropRate:
      return multiuser_grid("fig3");
    case Preset::Fig4Throughput:
      return multiuser_grid("fig4");
    case Preset::Fig5Convergence: {
      std::vector<ExperimentConfig> out;
      for (SchedulerSpec s : {SchedulerSpec{SchedulerKind::Dpc, kDefaultV},
                              SchedulerSpec{SchedulerKind::Ldf, kDefaultV}}) {
        ExperimentConfig c = multiuser_config(100, 6, s);
        c.label = "fig5 " + scheduler_label(s);
        c.trace_every = 200;
        out.push_back(std::move(c));
      }
      return out;
    }
    case Preset::Custom:
      break;
  }
  throw ConfigError("preset 'custom' needs --config");
}

}  // namespace wsched::cli
