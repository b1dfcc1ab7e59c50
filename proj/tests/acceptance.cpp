// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Runs the full-size experiments, so it takes a while.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "reference/reference_model.hpp"
#include "wsched/analysis.hpp"
#include "wsched/cli/batch.hpp"
#include "wsched/cli/emit.hpp"
#include "wsched/cli/presets.hpp"

using namespace wsched;
using namespace wsched::cli;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

/// Replication mean of one per-user average for config c.
double mean_over_reps(const std::vector<RunOutput>& outputs, std::size_t c,
                      double UserAverages::*field, std::size_t user) {
  double sum = 0.0;
  int n = 0;
  for (const RunOutput& o : outputs) {
    if (o.config_index != c) continue;
    sum += o.result.users[user].*field;
    ++n;
  }
  return sum / n;
}

// 1 and 2 share the fig2 sweep; 8 and 9 reuse it too.
struct Fig2 {
  std::vector<ExperimentConfig> configs;
  std::vector<RunOutput> outputs;
  double seconds = 0.0;
};

Fig2 run_fig2() {
  Fig2 f;
  f.configs = expand_preset(Preset::Fig2Tradeoff);
  const auto start = Clock::now();
  f.outputs = run_batch(f.configs);
  f.seconds = seconds_since(start);
  return f;
}

void criterion_1(const Fig2& f) {
  bool ok = f.seconds < 5.0;
  std::string detail;
  for (std::size_t c = 0; c < f.configs.size(); ++c) {
    const double p1 = mean_over_reps(f.outputs, c, &UserAverages::avg_power, 0);
    const double p2 = mean_over_reps(f.outputs, c, &UserAverages::avg_power, 1);
    const double mu2 = mean_over_reps(f.outputs, c, &UserAverages::throughput, 1);
    ok = ok && p1 <= 0.70 + 0.02 && p2 <= 0.65 + 0.02 && mu2 >= 0.40 - 0.02;
    detail += fmt("V=%g: p1=%.4f p2=%.4f mu2=%.4f; ", f.configs[c].scheduler.V, p1, p2, mu2);
  }
  detail += fmt("runtime %.2f s (limit 5 s)", f.seconds);
  report(1, ok, detail);
}

void criterion_2(const Fig2& f) {
  constexpr double kSlack = 0.005;
  std::vector<double> drop, p1;
  std::string detail;
  for (std::size_t c = 0; c < f.configs.size(); ++c) {
    drop.push_back(mean_over_reps(f.outputs, c, &UserAverages::drop_rate, 0));
    p1.push_back(mean_over_reps(f.outputs, c, &UserAverages::avg_power, 0));
    detail += fmt("V=%g: D1=%.4f p1=%.4f; ", f.configs[c].scheduler.V, drop.back(), p1.back());
  }
  bool ok = true;
  for (std::size_t k = 1; k < drop.size(); ++k) {
    ok = ok && drop[k] <= drop[k - 1] + kSlack && p1[k] >= p1[k - 1] - kSlack;
  }
  report(2, ok, detail + "slack 0.005");
}

void criteria_3_and_4() {
  std::vector<ExperimentConfig> configs;
  for (int k : {4, 5, 6}) {
    configs.push_back(multiuser_config(10, k, {SchedulerKind::Dpc, kDefaultV}));
    configs.push_back(multiuser_config(10, k, {SchedulerKind::Ldf, kDefaultV}));
  }
  configs.push_back(multiuser_config(30, 6, {SchedulerKind::Ldf, kDefaultV}));
  const auto start = Clock::now();
  const auto outputs = run_batch(configs);
  const double secs = seconds_since(start);

  bool ok3 = true;
  std::string d3;
  for (std::size_t j = 0; j < 3; ++j) {
    const double dpc = mean_over_reps(outputs, 2 * j, &UserAverages::drop_rate, 0);
    const double ldf = mean_over_reps(outputs, 2 * j + 1, &UserAverages::drop_rate, 0);
    ok3 = ok3 && dpc <= ldf;
    d3 += fmt("K=%zu: DPC D=%.5f LDF D=%.5f; ", j + 4, dpc, ldf);
  }
  report(3, ok3, d3 + fmt("m=10, 20 reps, %.1f s", secs));

  const double ldf10 = mean_over_reps(outputs, 5, &UserAverages::drop_rate, 0);
  const double ldf30 = mean_over_reps(outputs, 6, &UserAverages::drop_rate, 0);
  report(4, ldf30 <= ldf10,
         fmt("LDF K=6: D(m=30)=%.5f D(m=10)=%.5f", ldf30, ldf10));
}

/// Replays a full run and checks every slot's choice against a fresh
/// enumeration of all power vectors. Returns the number of violations.
std::int64_t verify_per_slot_optimality(const ExperimentConfig& config,
                                        std::int64_t& slots_checked) {
  World world(config.specs, config.levels);
  DpcPolicy policy(config.specs, config.scheduler.V);
  InputSource source(config.seed, 0);
  SlotInputs in;
  SlotRecord record;
  const std::size_t n = config.specs.size();
  std::vector<int> head(n);
  std::int64_t violations = 0;
  for (std::int64_t t = 0; t < config.horizon; ++t) {
    source.draw(config.specs, in);
    const DpcState before = policy.state();
    for (std::size_t i = 0; i < n; ++i) head[i] = world.queues[i].head_ttl().value_or(0);

    step(world, policy, in, record);

    std::vector<double> chosen(n, 0.0);
    if (!record.action.is_idle()) chosen[record.action.user()] = record.action.power();
    const double chosen_obj =
        reference::ref_objective(chosen, config.specs, before.X, before.Z, before.V, head);
    if (chosen_obj != record.objective) ++violations;
    for (const auto& p : reference::ref_power_vectors(in.channels, config.levels)) {
      bool sends_nothing = false;
      for (std::size_t i = 0; i < n; ++i) {
        sends_nothing |= p[i] > 0.0 && config.specs[i].is_deadline() && head[i] == 0;
      }
      if (sends_nothing) continue;
      if (reference::ref_objective(p, config.specs, before.X, before.Z, before.V, head) <
          chosen_obj) {
        ++violations;
      }
    }
    ++slots_checked;
  }
  return violations;
}

void criterion_5() {
  ExperimentConfig fig2 = fig2_config(100.0);
  ExperimentConfig multi = multiuser_config(10, 6, {SchedulerKind::Dpc, kDefaultV});
  std::int64_t slots = 0;
  const std::int64_t v = verify_per_slot_optimality(fig2, slots) +
                         verify_per_slot_optimality(multi, slots);
  report(5, v == 0,
         fmt("%lld slots over two 1e5-slot runs (2 and 7 users), %lld violations",
             static_cast<long long>(slots), static_cast<long long>(v)));
}

void criterion_6() {
  std::mt19937_64 gen(6);
  int bad = 0;
  constexpr int kTransitions = 10000;
  for (int k = 0; k < kTransitions; ++k) {
    const int m = 1 + static_cast<int>(gen() % 30);
    std::vector<int> ttls;
    for (int d = 1; d <= m; ++d) {
      if (gen() % 3 == 0) ttls.push_back(d);
    }
    const DeadlineQueue q = DeadlineQueue::from_ttls(m, ttls);
    const bool served = !ttls.empty() && gen() % 2;
    const bool arrival = gen() % 2;
    const QueueTransition r = advance_queue(q, served, arrival);

    reference::RefQueue ref{ttls};
    const bool ref_dropped = reference::ref_advance(ref, served, arrival, m);
    const std::int64_t old_len = static_cast<std::int64_t>(ttls.size());
    const std::int64_t expected =
        std::max<std::int64_t>(old_len - served, 0) + arrival - (r.dropped ? 1 : 0);
    std::vector<int> got;
    for (const Packet& p : r.queue.packets()) got.push_back(p.ttl);
    const bool ok = static_cast<std::int64_t>(r.queue.size()) == expected &&
                    r.dropped == ref_dropped && got == ref.ttl &&
                    old_len + arrival - served - static_cast<std::int64_t>(got.size()) <= 1;
    bad += ok ? 0 : 1;
  }
  report(6, bad == 0, fmt("%d transitions, %d violations", kTransitions, bad));
}

void criterion_7() {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto start = Clock::now();
  int mismatches = 0, compared = 0, dpc_below = 0, infeasible = 0;
  constexpr int kInstances = 100;
  for (int k = 0; k < kInstances; ++k) {
    ExperimentConfig c;
    const std::size_t n = 1 + gen() % 2;
    c.specs.push_back(UserSpec::deadline_user(0.3 + 0.6 * u(gen),
                                              2 + static_cast<int>(gen() % 5),
                                              0.3 + 1.2 * u(gen), u(gen)));
    if (n == 2) c.specs.push_back(UserSpec::throughput_user(0.5 * u(gen), 0.3 + 1.2 * u(gen), u(gen)));
    c.scheduler = {SchedulerKind::Dpc, 1.0 + 99.0 * u(gen)};
    c.seed = gen();
    const std::size_t slots = 1 + gen() % 10;

    OracleProblem p;
    p.specs = c.specs;
    p.levels = c.levels;
    p.path = draw_sample_path(c, 0, static_cast<std::int64_t>(slots));
    const OracleResult bb = offline_oracle(p);
    reference::RefExhaustive ex(p.specs, p.levels, p.path);
    const reference::RefOracleResult er = ex.solve();
    if (bb.feasible != er.feasible ||
        (er.feasible && (bb.cost_units != er.cost_units || bb.schedule != er.schedule))) {
      ++mismatches;
    }
    if (!bb.feasible) {
      ++infeasible;
      continue;
    }

    World world(c.specs, c.levels);
    DpcPolicy policy(c.specs, c.scheduler.V);
    std::int64_t dpc_units = 0;
    for (const SlotInputs& in : p.path) {
      const SlotRecord r = step(world, policy, in);
      for (std::size_t i = 0; i < c.specs.size(); ++i) {
        if (!c.specs[i].is_deadline() || r.head_ttl[i] == 0) continue;
        // Integer units straight from the decision-time ttl, as the
        // reference search counts them.
        const int m = c.specs[i].deadline();
        if (!r.served[i]) dpc_units += (m - (r.head_ttl[i] - 1)) * (bb.denominator / m);
      }
    }
    std::vector<double> energy;
    std::vector<std::int64_t> services;
    for (std::size_t i = 0; i < c.specs.size(); ++i) {
      energy.push_back(world.metrics.energy(i));
      services.push_back(world.metrics.services(i));
    }
    if (!within_budgets(horizon_budgets(c.specs, static_cast<std::int64_t>(slots)), energy,
                        services)) {
      continue;
    }
    ++compared;
    if (dpc_units < bb.cost_units) ++dpc_below;
  }
  const double secs = seconds_since(start);
  report(7, mismatches == 0 && dpc_below == 0 && secs < 30.0,
         fmt("%d instances (%d infeasible): B&B vs exhaustive mismatches %d; "
             "DPC within budgets on %d, below oracle on %d; %.2f s (limit 30 s)",
             kInstances, infeasible, mismatches, compared, dpc_below, secs));
}

void criterion_8(const Fig2& f) {
  std::size_t c = 0;
  while (f.configs[c].scheduler.V != 1000.0) ++c;
  const ExperimentConfig& config = f.configs[c];
  double fbar = 0.0;
  int reps = 0, bounded = 0;
  double q2 = 0.0, h2 = 0.0;
  for (const RunOutput& o : f.outputs) {
    if (o.config_index != c) continue;
    ++reps;
    fbar += o.result.fbar();
    q2 += o.result.backlog.mean_second_quarter;
    h2 += o.result.backlog.mean_second_half;
    bounded += o.report.backlog_bounded ? 1 : 0;
  }
  fbar /= reps;
  constexpr std::size_t kWindow = 12, kWindows = 200;
  const auto proxy = windowed_oracle_proxy(config, 0, kWindow, kWindows);
  const double gap = bound_B(config) / config.scheduler.V;
  std::string detail = fmt("V=1000: fbar=%.5f", fbar);
  if (proxy) {
    detail += fmt(" offline proxy=%.5f (%zu windows of %zu slots) fbar-proxy=%.5f",
                  *proxy, kWindows, kWindow, fbar - *proxy);
  } else {
    detail += " offline proxy unavailable";
  }
  // Judged on 20-replication means like criteria 1-4; single replications
  // at V=1000 mix slowly and scatter both ways around a ratio of 1.
  const bool held = backlog_bounded({std::nan(""), q2 / reps, h2 / reps});
  detail += fmt(" B/V=%.4f; replication-mean backlog [T/4,T/2)=%.3f [T/2,T)=%.3f "
                "ratio %.4f (limit 1.10); single replications within limit %d/%d; "
                "pass/fail on the surrogate only, f_opt is not observable",
                gap, q2 / reps, h2 / reps, h2 / q2, bounded, reps);
  report(8, held, detail);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void criterion_9(const Fig2& f) {
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / "wsched_acceptance_determinism";
  fs::remove_all(base);
  emit(Preset::Fig2Tradeoff, f.configs, f.outputs, Format::Csv, base / "a");
  const auto again = run_batch(f.configs);
  emit(Preset::Fig2Tradeoff, f.configs, again, Format::Csv, base / "b");
  bool ok = true;
  std::string detail;
  for (const char* name : {"final.csv", "trace.csv"}) {
    const std::string a = slurp(base / "a" / name);
    const std::string b = slurp(base / "b" / name);
    ok = ok && !a.empty() && a == b;
    detail += fmt("%s %zu bytes %s; ", name, a.size(), a == b ? "identical" : "DIFFER");
  }
  fs::remove_all(base);
  report(9, ok, detail + "fig2 preset, two independent batches");
}

}  // namespace

int main() {
  const Fig2 fig2 = run_fig2();
  criterion_1(fig2);
  criterion_2(fig2);
  criteria_3_and_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8(fig2);
  criterion_9(fig2);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
