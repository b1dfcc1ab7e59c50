#include "wsched/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace wsched {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kBudgetSlack = 1e-9;

std::size_t deadline_user_count(std::span<const UserSpec> specs) {
  return static_cast<std::size_t>(std::count_if(
      specs.begin(), specs.end(), [](const UserSpec& s) { return s.is_deadline(); }));
}

template <typename T>
void append_bytes(std::string& key, const T& value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  key.append(buf, sizeof(T));
}

class BranchAndBound {
 public:
  explicit BranchAndBound(const OracleProblem& problem)
      : problem_(problem),
        slots_(problem.path.size()),
        users_(problem.specs.size()),
        budgets_(horizon_budgets(problem.specs, static_cast<std::int64_t>(slots_))),
        denominator_(cost_denominator(problem.specs)),
        energy_(users_, 0.0),
        services_(users_, 0) {}

  OracleResult solve() {
    std::vector<DeadlineQueue> queues = problem_.initial_queues;
    if (queues.empty()) {
      for (const UserSpec& s : problem_.specs) {
        queues.push_back(s.is_deadline() ? DeadlineQueue(s.deadline()) : DeadlineQueue());
      }
    }
    search(0, queues, 0);

    OracleResult result;
    result.denominator = denominator_;
    result.nodes = nodes_;
    result.feasible = found_;
    if (found_) {
      result.cost_units = best_cost_;
      result.schedule = best_schedule_;
    }
    return result;
  }

 private:
  std::int64_t outstanding_services() const {
    std::int64_t need = 0;
    for (std::size_t i = 0; i < users_; ++i) {
      need += std::max<std::int64_t>(0, budgets_.min_services[i] - services_[i]);
    }
    return need;
  }

  // Waiting deadline users all pay this slot except the one that is served.
  std::int64_t slot_lower_bound(const std::vector<DeadlineQueue>& queues) const {
    std::int64_t sum = 0;
    std::int64_t largest = 0;
    for (std::size_t i = 0; i < users_; ++i) {
      const UserSpec& s = problem_.specs[i];
      if (!s.is_deadline() || queues[i].empty()) continue;
      const std::int64_t f =
          urgency_units(queues[i].head_ttl(), s.deadline(), false, denominator_);
      sum += f;
      largest = std::max(largest, f);
    }
    return sum - largest;
  }

  std::string state_key(std::size_t t, const std::vector<DeadlineQueue>& queues) const {
    std::string key;
    append_bytes(key, t);
    for (std::size_t i = 0; i < users_; ++i) {
      for (const Packet& p : queues[i].packets()) append_bytes(key, p.ttl);
      append_bytes(key, -1);
      append_bytes(key, energy_[i]);
      append_bytes(key, services_[i]);
    }
    return key;
  }

  void search(std::size_t t, const std::vector<DeadlineQueue>& queues,
              std::int64_t cost) {
    ++nodes_;
    if (found_ && cost >= best_cost_) return;
    if (t == slots_) {
      if (within_budgets(budgets_, energy_, services_)) {
        found_ = true;
        best_cost_ = cost;
        best_schedule_ = schedule_;
      }
      return;
    }
    if (outstanding_services() > static_cast<std::int64_t>(slots_ - t)) return;
    if (found_ && cost + slot_lower_bound(queues) >= best_cost_) return;

    auto [it, inserted] = visited_.try_emplace(state_key(t, queues), cost);
    if (!inserted) {
      if (it->second <= cost) return;
      it->second = cost;
    }

    const SlotInputs& in = problem_.path[t];
    std::vector<Action> candidates =
        candidate_actions(problem_.specs, in.channels, problem_.levels, queues);
    for (const Action& action : candidates) {
      std::int64_t slot_cost = 0;
      for (std::size_t i = 0; i < users_; ++i) {
        const UserSpec& s = problem_.specs[i];
        if (s.is_deadline()) {
          slot_cost += urgency_units(queues[i].head_ttl(), s.deadline(),
                                     action.service_of(i) == 1, denominator_);
        }
      }
      if (!action.is_idle()) {
        const UserIndex u = action.user();
        if (energy_[u] + action.power() > budgets_.energy_cap[u]) continue;
        energy_[u] += action.power();
        services_[u] += 1;
      }

      std::vector<DeadlineQueue> next = queues;
      for (std::size_t i = 0; i < users_; ++i) {
        if (problem_.specs[i].is_deadline()) {
          next[i].advance(action.service_of(i) == 1, in.arrivals[i] != 0);
        }
      }
      schedule_.push_back(action);
      search(t + 1, next, cost + slot_cost);
      schedule_.pop_back();

      if (!action.is_idle()) {
        energy_[action.user()] -= action.power();
        services_[action.user()] -= 1;
      }
    }
  }

  const OracleProblem& problem_;
  std::size_t slots_;
  std::size_t users_;
  HorizonBudgets budgets_;
  std::int64_t denominator_;

  std::vector<double> energy_;
  std::vector<std::int64_t> services_;
  std::vector<Action> schedule_;
  std::unordered_map<std::string, std::int64_t> visited_;

  bool found_ = false;
  std::int64_t best_cost_ = std::numeric_limits<std::int64_t>::max();
  std::vector<Action> best_schedule_;
  std::uint64_t nodes_ = 0;
};

}  // namespace

double bound_B(const ExperimentConfig& config) {
  const double n = static_cast<double>(config.specs.size());
  const double r = static_cast<double>(deadline_user_count(config.specs));
  const double p = config.levels.high();
  return 0.5 * (n + 1.0) * p * p + 0.5 * (r + 1.0) + 0.5 * (r + 1.0);
}

double bound_B_alternative(const ExperimentConfig& config) {
  const double n = static_cast<double>(config.specs.size());
  const double r = static_cast<double>(deadline_user_count(config.specs));
  const double p = config.levels.high();
  return 0.5 * n * p * p + 0.5 * r + 0.5 * r;
}

double lyapunov_value(const DpcState& state) {
  double sum = 0.0;
  for (double x : state.X) sum += x * x;
  for (double z : state.Z) sum += z * z;
  return 0.5 * sum;
}

HorizonBudgets horizon_budgets(std::span<const UserSpec> specs,
                               std::int64_t slots) {
  HorizonBudgets b;
  const double T = static_cast<double>(slots);
  for (const UserSpec& s : specs) {
    b.energy_cap.push_back(s.gamma * T + kBudgetSlack);
    b.min_services.push_back(
        s.is_throughput()
            ? static_cast<std::int64_t>(std::floor(s.target_rate() * T + kBudgetSlack))
            : 0);
  }
  return b;
}

bool within_budgets(const HorizonBudgets& budgets,
                    std::span<const double> energy,
                    std::span<const std::int64_t> services) {
  for (std::size_t i = 0; i < energy.size(); ++i) {
    if (energy[i] > budgets.energy_cap[i]) return false;
    if (services[i] < budgets.min_services[i]) return false;
  }
  return true;
}

std::int64_t cost_denominator(std::span<const UserSpec> specs) {
  std::int64_t l = 1;
  for (const UserSpec& s : specs) {
    if (s.is_deadline()) l = std::lcm(l, static_cast<std::int64_t>(s.deadline()));
  }
  return l;
}

std::int64_t urgency_units(std::optional<int> head_ttl, int deadline,
                           bool served, std::int64_t denominator) {
  if (served || !head_ttl) return 0;
  return (deadline - (*head_ttl - 1)) * (denominator / deadline);
}

OracleResult offline_oracle(const OracleProblem& problem) {
  if (problem.path.size() > kOracleMaxSlots) {
    throw std::invalid_argument("offline oracle supports at most " +
                                std::to_string(kOracleMaxSlots) + " slots");
  }
  if (problem.specs.size() > kOracleMaxUsers) {
    throw std::invalid_argument("offline oracle supports at most " +
                                std::to_string(kOracleMaxUsers) + " users");
  }
  if (!problem.initial_queues.empty() &&
      problem.initial_queues.size() != problem.specs.size()) {
    throw std::invalid_argument("initial_queues must have one entry per user");
  }
  for (const SlotInputs& in : problem.path) {
    if (in.channels.size() != problem.specs.size() ||
        in.arrivals.size() != problem.specs.size()) {
      throw std::invalid_argument("sample path does not match the user count");
    }
  }
  return BranchAndBound(problem).solve();
}

std::optional<double> windowed_oracle_proxy(const ExperimentConfig& config,
                                            std::uint64_t replication,
                                            std::size_t window_slots,
                                            std::size_t windows) {
  const auto path = draw_sample_path(config, replication,
                                     static_cast<std::int64_t>(window_slots * windows));
  double sum = 0.0;
  std::size_t feasible = 0;
  for (std::size_t w = 0; w < windows; ++w) {
    OracleProblem problem;
    problem.specs = config.specs;
    problem.levels = config.levels;
    problem.path.assign(path.begin() + static_cast<std::ptrdiff_t>(w * window_slots),
                        path.begin() + static_cast<std::ptrdiff_t>((w + 1) * window_slots));
    const OracleResult r = offline_oracle(problem);
    if (!r.feasible) continue;
    sum += r.cost() / static_cast<double>(window_slots);
    ++feasible;
  }
  if (feasible == 0) return std::nullopt;
  return sum / static_cast<double>(feasible);
}

bool backlog_bounded(const BacklogStats& stats, double tolerance) {
  if (std::isnan(stats.mean_second_half) || std::isnan(stats.mean_second_quarter)) {
    return false;
  }
  return stats.mean_second_half <= (1.0 + tolerance) * stats.mean_second_quarter;
}

BoundReport bound_report(const ExperimentConfig& config, const RunResult& run,
                         std::optional<double> fbar_offline) {
  BoundReport r;
  r.B = bound_B(config);
  r.B_alternative = bound_B_alternative(config);
  const bool dpc = config.scheduler.kind == SchedulerKind::Dpc;
  r.V = dpc ? config.scheduler.V : kNaN;
  r.fbar = run.fbar();
  r.fbar_offline = fbar_offline;
  r.gap_bound = r.B / r.V;
  r.queue_avg = run.backlog.mean;
  r.backlog_second_quarter = run.backlog.mean_second_quarter;
  r.backlog_second_half = run.backlog.mean_second_half;
  r.backlog_bounded = dpc && backlog_bounded(run.backlog);
  if (dpc && fbar_offline) r.gap_check = r.fbar <= *fbar_offline + r.gap_bound;
  return r;
}

}  // namespace wsched
