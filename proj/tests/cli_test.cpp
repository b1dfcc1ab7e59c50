#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "wsched/cli/batch.hpp"
#include "wsched/cli/config.hpp"
#include "wsched/cli/emit.hpp"
#include "wsched/cli/presets.hpp"

namespace wsched::cli {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("wsched_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(Presets, Fig2Users) {
  const auto configs = expand_preset(Preset::Fig2Tradeoff);
  ASSERT_EQ(configs.size(), 3u);
  std::vector<double> vs;
  for (const ExperimentConfig& c : configs) {
    vs.push_back(c.scheduler.V);
    ASSERT_EQ(c.specs.size(), 2u);
    EXPECT_TRUE(c.specs[0].is_deadline());
    EXPECT_EQ(c.specs[0].lambda(), 0.5);
    EXPECT_EQ(c.specs[0].deadline(), 10);
    EXPECT_EQ(c.specs[0].gamma, 0.7);
    EXPECT_TRUE(c.specs[1].is_throughput());
    EXPECT_EQ(c.specs[1].target_rate(), 0.4);
    EXPECT_EQ(c.specs[1].gamma, 0.65);
    for (const UserSpec& s : c.specs) EXPECT_EQ(s.good_prob, 0.4);
    EXPECT_EQ(c.levels, PowerLevels(1.0, 2.0));
    EXPECT_EQ(c.horizon, 100000);
    EXPECT_EQ(c.replications, 20);
  }
  EXPECT_EQ(vs, (std::vector<double>{10.0, 100.0, 1000.0}));
}

TEST(Presets, Fig3Grid) {
  const auto configs = expand_preset(Preset::Fig3DropRate);
  ASSERT_EQ(configs.size(), 2u * 6u * 2u);
  for (const ExperimentConfig& c : configs) {
    EXPECT_TRUE(c.specs[0].is_deadline());
    EXPECT_EQ(c.specs[0].lambda(), 0.35);
    for (const UserSpec& s : c.specs) {
      EXPECT_EQ(s.gamma, 2.0);
      EXPECT_EQ(s.good_prob, 0.9);
    }
    EXPECT_GE(c.specs.size(), 2u);
    EXPECT_LE(c.specs.size(), 7u);
  }
}

TEST(Presets, Fig5AndCustom) {
  const auto configs = expand_preset(Preset::Fig5Convergence);
  ASSERT_EQ(configs.size(), 2u);
  EXPECT_EQ(configs[0].specs[0].deadline(), 100);
  EXPECT_EQ(configs[0].scheduler.kind, SchedulerKind::Dpc);
  EXPECT_EQ(configs[1].scheduler.kind, SchedulerKind::Ldf);
  EXPECT_EQ(configs[0].specs.size(), 7u);
  EXPECT_THROW(expand_preset(Preset::Custom), ConfigError);
  EXPECT_EQ(parse_preset("fig4-throughput"), Preset::Fig4Throughput);
  EXPECT_FALSE(parse_preset("fig9").has_value());
}

constexpr const char* kTwoUser = R"(
[experiment]
label = two
scheduler = ldf
slots = 500
seed = 9
replications = 2

[user]
role = deadline
arrival_prob = 0.5
deadline = 10
gamma = 0.7
good_prob = 0.4

[user]
role = throughput   # saturated
delta = 0.4
gamma = 0.65
good_prob = 0.4
)";

TEST(ParseConfigText, TwoUsers) {
  const auto configs = parse_config_text(kTwoUser);
  ASSERT_EQ(configs.size(), 1u);
  const ExperimentConfig& c = configs[0];
  EXPECT_EQ(c.label, "two");
  EXPECT_EQ(c.scheduler.kind, SchedulerKind::Ldf);
  EXPECT_EQ(c.horizon, 500);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.replications, 2);
  ASSERT_EQ(c.specs.size(), 2u);
  EXPECT_EQ(c.specs[1].target_rate(), 0.4);
  EXPECT_EQ(c.specs[0].deadline(), 10);
}

std::string error_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

TEST(ParseConfigText, Errors) {
  const std::string delta_on_deadline = error_of(
      "[experiment]\n[user]\nrole = deadline\narrival_prob = 0.5\ndeadline = 10\n"
      "gamma = 0.7\ngood_prob = 0.4\ndelta = 0.3\n");
  EXPECT_NE(delta_on_deadline.find("delta"), std::string::npos) << delta_on_deadline;
  EXPECT_NE(delta_on_deadline.find("user 1"), std::string::npos) << delta_on_deadline;

  const std::string unknown = error_of("[experiment]\nspeed = 3\n");
  EXPECT_NE(unknown.find("speed"), std::string::npos);
  EXPECT_NE(unknown.find("line 2"), std::string::npos);

  EXPECT_NE(error_of("[experiment]\nslots = ten\n").find("slots"), std::string::npos);
  EXPECT_NE(error_of("[experiment]\nv = 1\nv = 2\n").find("duplicate"), std::string::npos);
  EXPECT_FALSE(error_of("[experiment]\n").empty());
  EXPECT_FALSE(error_of("[user]\nrole = deadline\n").empty());
  EXPECT_FALSE(error_of("[experiment]\np_low = 2\np_high = 2\n").empty());
}

TEST(ParseConfigJson, SingleAndMany) {
  const auto single = parse_config_json(nlohmann::json::parse(R"({
    "label": "j", "v": 10, "users": [
      {"role": "throughput", "delta": 0.2, "gamma": 1, "good_prob": 0.5}]})"));
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0].scheduler.V, 10.0);

  const auto many = parse_config_json(nlohmann::json::parse(R"({"configs": [
    {"users": [{"role": "throughput", "delta": 0.2, "gamma": 1, "good_prob": 0.5}]},
    {"scheduler": "ldf", "users": [
      {"role": "deadline", "arrival_prob": 0.2, "deadline": 4, "gamma": 1, "good_prob": 0.5}]}
  ]})"));
  ASSERT_EQ(many.size(), 2u);
  EXPECT_EQ(many[1].scheduler.kind, SchedulerKind::Ldf);

  EXPECT_THROW(parse_config_json(nlohmann::json::parse(R"({"users": [
      {"role": "throughput", "delta": 0.2, "gamma": 1, "good_prob": 0.5, "m": 3}]})")),
               ConfigError);
}

TEST(Overrides, ReplaceFields) {
  auto configs = expand_preset(Preset::Fig2Tradeoff);
  Overrides o;
  o.scheduler = SchedulerKind::Ldf;
  o.slots = 123;
  o.seed = 42;
  apply_overrides(configs, o);
  for (const ExperimentConfig& c : configs) {
    EXPECT_EQ(c.scheduler.kind, SchedulerKind::Ldf);
    EXPECT_EQ(c.horizon, 123);
    EXPECT_EQ(c.seed, 42u);
    EXPECT_EQ(c.replications, 20);
  }
}

// config -> JSON -> config is the identity on randomly generated configs.
TEST(ConfigJsonProperty, RoundTrip) {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    ExperimentConfig c;
    c.label = "cfg" + std::to_string(trial);
    c.levels = PowerLevels(0.5 + u(gen), 2.0 + u(gen));
    c.scheduler = {gen() % 2 ? SchedulerKind::Dpc : SchedulerKind::Ldf, 0.1 + 1000 * u(gen)};
    c.horizon = 1 + static_cast<std::int64_t>(gen() % 100000);
    c.seed = gen();
    c.replications = 1 + static_cast<std::int64_t>(gen() % 30);
    c.trace_every = 1 + static_cast<std::int64_t>(gen() % 500);
    const std::size_t n = 1 + gen() % 5;
    for (std::size_t i = 0; i < n; ++i) {
      if (gen() % 2) {
        c.specs.push_back(UserSpec::deadline_user(u(gen), 1 + static_cast<int>(gen() % 50),
                                                  2.0 * u(gen), u(gen)));
      } else {
        c.specs.push_back(UserSpec::throughput_user(u(gen), 2.0 * u(gen), u(gen)));
      }
    }
    const auto back = parse_config_json(config_to_json(c));
    ASSERT_EQ(back.size(), 1u);
    ASSERT_TRUE(same_config(c, back[0])) << config_to_json(c).dump();
    EXPECT_EQ(back[0].seed, c.seed);
    EXPECT_EQ(back[0].specs[0].gamma, c.specs[0].gamma);
  }
}

TEST(Emit, EmptyResultsGiveHeaderOnlyCsv) {
  const Table t = final_table({}, {});
  const std::string csv = to_csv(t);
  std::string header;
  for (std::size_t k = 0; k < kFinalColumns.size(); ++k) {
    header += (k ? "," : "") + kFinalColumns[k];
  }
  EXPECT_EQ(csv, header + "\n");
  EXPECT_EQ(to_csv(trace_table({})).find('\n'), to_csv(trace_table({})).size() - 1);
}

std::vector<ExperimentConfig> tiny_configs() {
  ExperimentConfig a = fig2_config(100.0);
  a.horizon = 600;
  a.replications = 2;
  a.trace_every = 200;
  ExperimentConfig b = a;
  b.scheduler.kind = SchedulerKind::Ldf;
  b.label = "fig2 ldf";
  return {a, b};
}

TEST(Batch, OrderIndependentOfThreads) {
  const auto configs = tiny_configs();
  const auto one = run_batch(configs, 1);
  const auto three = run_batch(configs, 3);
  ASSERT_EQ(one.size(), 4u);
  ASSERT_EQ(three.size(), 4u);
  for (std::size_t k = 0; k < one.size(); ++k) {
    EXPECT_EQ(one[k].config_index, k / 2);
    EXPECT_EQ(one[k].result.replication, k % 2);
    EXPECT_EQ(one[k].config_index, three[k].config_index);
    EXPECT_EQ(one[k].result.total_cost, three[k].result.total_cost);
  }
  EXPECT_EQ(final_table(configs, one), final_table(configs, three));
}

TEST(Emit, JsonRoundTripOfEveryTable) {
  const auto configs = tiny_configs();
  const auto outputs = run_batch(configs, 1);
  const fs::path dir = scratch_dir("json");
  const auto written = emit(Preset::Custom, configs, outputs, Format::Json, dir);
  EXPECT_TRUE(fs::exists(dir / "final.json"));
  EXPECT_TRUE(fs::exists(dir / "trace.json"));
  EXPECT_TRUE(fs::exists(dir / "configs.json"));

  EXPECT_EQ(read_table_json(dir / "final.json"), final_table(configs, outputs));
  EXPECT_EQ(read_table_json(dir / "trace.json"), trace_table(outputs));
  for (const NamedTable& nt : plot_tables(Preset::Custom, configs, outputs)) {
    EXPECT_EQ(read_table_json(dir / (nt.name + ".json")), nt.table) << nt.name;
  }
  // The echoed configs reload to the same configs.
  const auto reloaded = load_config_file(dir / "configs.json");
  ASSERT_EQ(reloaded.size(), configs.size());
  for (std::size_t k = 0; k < configs.size(); ++k) {
    EXPECT_TRUE(same_config(reloaded[k], configs[k]));
  }
  fs::remove_all(dir);
}

TEST(Emit, CsvColumnsAndDeterminism) {
  const auto configs = tiny_configs();
  const fs::path a = scratch_dir("csv_a");
  const fs::path b = scratch_dir("csv_b");
  emit(Preset::Custom, configs, run_batch(configs, 1), Format::Csv, a);
  emit(Preset::Custom, configs, run_batch(configs, 2), Format::Csv, b);
  for (const char* name : {"final.csv", "trace.csv", "plotdata_series.csv"}) {
    EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
  }
  const std::string trace = slurp(a / "trace.csv");
  EXPECT_EQ(trace.substr(0, trace.find('\n')),
            "config,replication,t,user,Qlen,head_ttl,X,Z_or_y,Dbar,pbar,mubar,fbar");
  // 2 configs x 2 replications x 3 snapshots x 2 users, plus the header.
  EXPECT_EQ(std::count(trace.begin(), trace.end(), '\n'), 1 + 2 * 2 * 3 * 2);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Emit, PresetPlotTables) {
  auto configs = expand_preset(Preset::Fig3DropRate);
  Overrides o;
  o.slots = 200;
  o.replications = 1;
  o.trace_every = 100;
  apply_overrides(configs, o);
  const auto outputs = run_batch(configs, 1);
  const auto tables = plot_tables(Preset::Fig3DropRate, configs, outputs);
  bool found = false;
  for (const NamedTable& nt : tables) {
    if (nt.name != "plotdata_fig3_droprate") continue;
    found = true;
    EXPECT_EQ(nt.table.rows.size(), 2u * 6u * 2u);
  }
  EXPECT_TRUE(found);
}

TEST(Format, Parse) {
  EXPECT_EQ(parse_format("csv"), Format::Csv);
  EXPECT_EQ(parse_format("json"), Format::Json);
  EXPECT_FALSE(parse_format("xml").has_value());
}

}  // namespace
}  // namespace wsched::cli
