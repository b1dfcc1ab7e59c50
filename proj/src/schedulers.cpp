#include "wsched/schedulers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wsched {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

double urgency_cost(std::optional<int> head_ttl, int deadline, bool served) {
  if (served || !head_ttl) return 0.0;
  const double m = deadline;
  return (m - (*head_ttl - 1)) / m;
}

DpcState DpcState::initial(std::size_t users, double V) {
  if (!(V > 0.0)) throw std::invalid_argument("V must be positive");
  DpcState s;
  s.X.assign(users, 0.0);
  s.Z.assign(users, 0.0);
  s.V = V;
  return s;
}

double dpc_objective(const Action& action, const DpcState& state,
                     const SlotView& view) {
  check_action(action, view.specs, view.channels, view.levels, view.queues);

  double power_term = 0.0;
  double throughput_term = 0.0;
  double urgency = 0.0;
  for (UserIndex i = 0; i < view.specs.size(); ++i) {
    const UserSpec& spec = view.specs[i];
    power_term += state.X[i] * (action.power_of(i) - spec.gamma);
    if (spec.is_throughput()) {
      throughput_term += state.Z[i] * (spec.target_rate() - action.service_of(i));
    }
  }
  for (UserIndex i = 0; i < view.specs.size(); ++i) {
    const UserSpec& spec = view.specs[i];
    if (spec.is_deadline()) {
      urgency += urgency_cost(view.queues[i].head_ttl(), spec.deadline(),
                              action.service_of(i) == 1);
    }
  }
  return power_term + throughput_term + state.V * urgency;
}

DpcDecision dpc_decide(const DpcState& state, const SlotView& view) {
  DpcDecision best{Action::idle(), std::numeric_limits<double>::infinity()};
  for_each_candidate(view.specs, view.channels, view.levels, view.queues,
                     [&](const Action& candidate) {
                       const double obj = dpc_objective(candidate, state, view);
                       if (obj < best.objective) best = {candidate, obj};
                     });
  return best;
}

void dpc_update_in_place(DpcState& state, const Action& action,
                         std::span<const UserSpec> specs) {
  for (UserIndex i = 0; i < specs.size(); ++i) {
    state.X[i] = std::max(state.X[i] - specs[i].gamma, 0.0) + action.power_of(i);
    if (specs[i].is_throughput()) {
      state.Z[i] = std::max(state.Z[i] - action.service_of(i), 0.0) +
                   specs[i].target_rate();
    }
  }
}

DpcState dpc_update(DpcState state, const Action& action,
                    std::span<const UserSpec> specs) {
  dpc_update_in_place(state, action, specs);
  return state;
}

LdfState LdfState::initial(std::span<const UserSpec> specs) {
  LdfState s;
  s.y.assign(specs.size(), 0.0);
  s.services.assign(specs.size(), 0);
  s.q.reserve(specs.size());
  for (const UserSpec& spec : specs) {
    s.q.push_back(spec.is_throughput() ? spec.target_rate() : spec.lambda());
  }
  return s;
}

void ldf_update_in_place(LdfState& state, const Action& action) {
  ++state.t;
  const double t = static_cast<double>(state.t);
  for (UserIndex i = 0; i < state.y.size(); ++i) {
    state.services[i] += action.service_of(i);
    state.y[i] = t * state.q[i] - static_cast<double>(state.services[i]);
  }
}

LdfState ldf_update(LdfState state, const Action& action) {
  ldf_update_in_place(state, action);
  return state;
}

Action ldf_decide(const LdfState& state, const SlotView& view) {
  UserIndex chosen = Action::kNoUser;
  double best_debt = 0.0;
  for (UserIndex i = 0; i < view.specs.size(); ++i) {
    const bool eligible = view.specs[i].is_throughput() || !view.queues[i].empty();
    if (eligible && state.y[i] > best_debt) {
      best_debt = state.y[i];
      chosen = i;
    }
  }
  if (chosen == Action::kNoUser) return Action::idle();
  return Action::serve(chosen, required_power(view.channels[chosen], view.levels));
}

std::string to_string(SchedulerKind kind) {
  return kind == SchedulerKind::Dpc ? "dpc" : "ldf";
}

std::optional<SchedulerKind> parse_scheduler_kind(const std::string& name) {
  if (name == "dpc") return SchedulerKind::Dpc;
  if (name == "ldf") return SchedulerKind::Ldf;
  return std::nullopt;
}

DpcPolicy::DpcPolicy(std::span<const UserSpec> specs, double V)
    : state_(DpcState::initial(specs.size(), V)) {
  throughput_.reserve(specs.size());
  for (const UserSpec& s : specs) throughput_.push_back(s.is_throughput());
}

Action DpcPolicy::decide(const SlotView& view) {
  const DpcDecision d = dpc_decide(state_, view);
  last_objective_ = d.objective;
  return d.action;
}

void DpcPolicy::update(const Action& action, std::span<const UserSpec> specs) {
  dpc_update_in_place(state_, action, specs);
}

double DpcPolicy::secondary_state(UserIndex i) const {
  return throughput_[i] ? state_.Z[i] : kNaN;
}

double DpcPolicy::virtual_backlog() const {
  double sum = 0.0;
  for (double x : state_.X) sum += x;
  for (double z : state_.Z) sum += z;
  return sum;
}

LdfPolicy::LdfPolicy(std::span<const UserSpec> specs)
    : state_(LdfState::initial(specs)) {}

Action LdfPolicy::decide(const SlotView& view) { return ldf_decide(state_, view); }

void LdfPolicy::update(const Action& action, std::span<const UserSpec>) {
  ldf_update_in_place(state_, action);
}

double LdfPolicy::power_backlog(UserIndex) const { return kNaN; }

double LdfPolicy::virtual_backlog() const { return kNaN; }

std::unique_ptr<Policy> make_policy(const SchedulerSpec& spec,
                                    std::span<const UserSpec> specs) {
  if (spec.kind == SchedulerKind::Dpc) {
    return std::make_unique<DpcPolicy>(specs, spec.V);
  }
  return std::make_unique<LdfPolicy>(specs);
}

}  // namespace wsched
