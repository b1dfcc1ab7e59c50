#include "wsched/engine.hpp"

#include <cmath>
#include <limits>

namespace wsched {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void resize_record(SlotRecord& r, std::size_t n) {
  r.dropped.assign(n, 0);
  r.power.assign(n, 0.0);
  r.served.assign(n, 0);
  r.urgency.assign(n, 0.0);
  r.queue_length.assign(n, 0);
  r.head_ttl.assign(n, 0);
  r.power_backlog.assign(n, 0.0);
  r.secondary_state.assign(n, 0.0);
}

}  // namespace

std::vector<std::string> validate(const ExperimentConfig& config) {
  if (config.horizon < 1) throw ConfigError("slots must be at least 1");
  if (config.trace_every < 1) throw ConfigError("trace_every must be at least 1");
  if (config.replications < 1) {
    throw ConfigError("replications must be at least 1");
  }
  if (config.scheduler.kind == SchedulerKind::Dpc && !(config.scheduler.V > 0.0)) {
    throw ConfigError("v must be positive");
  }
  for (std::size_t i = 0; i < config.specs.size(); ++i) {
    try {
      validate_user(config.specs[i], config.levels);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("user " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return model_warnings(config.specs);
}

std::vector<SlotInputs> draw_sample_path(const ExperimentConfig& config,
                                         std::uint64_t replication,
                                         std::int64_t slots) {
  InputSource source(config.seed, replication);
  std::vector<SlotInputs> path(static_cast<std::size_t>(slots));
  for (SlotInputs& in : path) source.draw(config.specs, in);
  return path;
}

MetricsAccumulator::MetricsAccumulator(std::size_t users)
    : arrivals_(users, 0),
      drops_(users, 0),
      services_(users, 0),
      energy_(users, 0.0),
      urgency_(users, 0.0) {}

void MetricsAccumulator::record(UserIndex i, bool arrival, bool dropped,
                                double power, int served, double urgency) {
  arrivals_[i] += arrival ? 1 : 0;
  drops_[i] += dropped ? 1 : 0;
  energy_[i] += power;
  services_[i] += served;
  urgency_[i] += urgency;
}

World::World(std::vector<UserSpec> user_specs, PowerLevels power_levels)
    : specs(std::move(user_specs)),
      levels(power_levels),
      metrics(specs.size()),
      preloaded(specs.size(), 0) {
  queues.reserve(specs.size());
  for (const UserSpec& s : specs) {
    queues.push_back(s.is_deadline() ? DeadlineQueue(s.deadline()) : DeadlineQueue());
  }
}

void World::preload(UserIndex i, DeadlineQueue queue) {
  if (t != 0) throw ContractViolation("preload after the first slot");
  if (!specs.at(i).is_deadline() || queue.deadline() != specs[i].deadline()) {
    throw ContractViolation("preloaded queue does not match user " + std::to_string(i + 1));
  }
  preloaded[i] = static_cast<std::int64_t>(queue.size());
  queues[i] = std::move(queue);
}

double SlotRecord::cost() const {
  double f = 0.0;
  for (double u : urgency) f += u;
  return f;
}

void step(World& world, Policy& policy, const SlotInputs& inputs,
          SlotRecord& record) {
  const std::size_t n = world.specs.size();
  if (inputs.channels.size() != n || inputs.arrivals.size() != n) {
    throw ContractViolation("slot inputs do not match the user count");
  }
  if (record.dropped.size() != n) resize_record(record, n);

  const SlotView view = world.view(inputs.channels);
  const Action action = policy.decide(view);
  check_action(action, world.specs, inputs.channels, world.levels, world.queues);

  record.t = world.t;
  record.action = action;
  record.objective = kNaN;
  if (policy.kind() == SchedulerKind::Dpc) {
    record.objective = static_cast<const DpcPolicy&>(policy).last_objective();
  }

  for (UserIndex i = 0; i < n; ++i) {
    const UserSpec& spec = world.specs[i];
    DeadlineQueue& queue = world.queues[i];
    const int served = action.service_of(i);
    const double power = action.power_of(i);

    record.queue_length[i] = queue.size();
    record.head_ttl[i] = queue.head_ttl().value_or(0);
    record.power_backlog[i] = policy.power_backlog(i);
    record.secondary_state[i] = policy.secondary_state(i);
    record.power[i] = power;
    record.served[i] = static_cast<std::uint8_t>(served);

    bool dropped = false;
    double urgency = 0.0;
    bool arrival = false;
    if (spec.is_deadline()) {
      urgency = urgency_cost(queue.head_ttl(), spec.deadline(), served == 1);
      arrival = inputs.arrivals[i] != 0;
      dropped = queue.advance(served == 1, arrival);
    }
    record.urgency[i] = urgency;
    record.dropped[i] = dropped ? 1 : 0;
    world.metrics.record(i, arrival, dropped, power, served, urgency);

    if (spec.is_deadline()) {
      const std::int64_t accounted = world.metrics.services(i) +
                                     world.metrics.drops(i) +
                                     static_cast<std::int64_t>(queue.size());
      if (accounted != world.metrics.arrivals(i) + world.preloaded[i]) {
        throw ContractViolation("packet accounting violated for user " +
                                std::to_string(i + 1));
      }
    }
  }
  world.metrics.end_slot();
  policy.update(action, world.specs);
  ++world.t;
}

SlotRecord step(World& world, Policy& policy, const SlotInputs& inputs) {
  SlotRecord record;
  step(world, policy, inputs, record);
  return record;
}

double RunResult::fbar() const {
  double sum = 0.0;
  for (const UserAverages& u : users) sum += u.avg_urgency;
  return sum;
}

RunResult run(const ExperimentConfig& config, std::uint64_t replication) {
  validate(config);
  World world(config.specs, config.levels);
  auto policy = make_policy(config.scheduler, config.specs);
  InputSource source(config.seed, replication);

  const std::int64_t T = config.horizon;
  const std::int64_t quarter = T / 4;
  const std::int64_t half = T / 2;
  double backlog_full = 0.0;
  double backlog_q2 = 0.0;
  double backlog_h2 = 0.0;

  RunResult result;
  result.replication = replication;
  result.slots = T;
  const std::size_t n = config.specs.size();

  SlotInputs inputs;
  SlotRecord record;
  for (std::int64_t t = 0; t < T; ++t) {
    const double backlog = policy->virtual_backlog();
    backlog_full += backlog;
    if (t >= quarter && t < half) backlog_q2 += backlog;
    if (t >= half) backlog_h2 += backlog;

    source.draw(config.specs, inputs);
    step(world, *policy, inputs, record);
    result.total_cost += record.cost();

    const std::int64_t elapsed = t + 1;
    if (elapsed % config.trace_every == 0 || elapsed == T) {
      const MetricsAccumulator& m = world.metrics;
      for (UserIndex i = 0; i < n; ++i) {
        TraceRow row;
        row.t = elapsed;
        row.user = i;
        row.queue_length = world.queues[i].size();
        row.head_ttl = world.queues[i].head_ttl().value_or(0);
        row.power_backlog = policy->power_backlog(i);
        row.secondary_state = policy->secondary_state(i);
        row.drop_rate = m.drop_rate(i);
        row.avg_power = m.avg_power(i);
        row.throughput = m.throughput(i);
        row.avg_urgency = m.avg_urgency(i);
        result.trace.push_back(row);
      }
    }
  }

  auto window_mean = [](double sum, std::int64_t len) {
    return len > 0 ? sum / static_cast<double>(len) : kNaN;
  };
  result.backlog.mean = window_mean(backlog_full, T);
  result.backlog.mean_second_quarter = window_mean(backlog_q2, half - quarter);
  result.backlog.mean_second_half = window_mean(backlog_h2, T - half);

  result.users.resize(n);
  for (UserIndex i = 0; i < n; ++i) {
    result.users[i] = {world.metrics.drop_rate(i), world.metrics.avg_power(i),
                       world.metrics.throughput(i), world.metrics.avg_urgency(i)};
  }
  return result;
}

}  // namespace wsched
