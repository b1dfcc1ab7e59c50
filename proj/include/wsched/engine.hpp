#ifndef WSCHED_ENGINE_HPP
#define WSCHED_ENGINE_HPP

// Slot loop: draws exogenous inputs, asks a policy for an action, applies
// the queue transitions and accumulates running averages.
//
// Slot order: observe channels -> decide on Q(t), d(t) and scheduler state
// -> serve -> expire/drop -> decrement ttls -> append arrivals -> update
// scheduler state and metrics.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "wsched/model.hpp"
#include "wsched/rng.hpp"
#include "wsched/schedulers.hpp"

namespace wsched {

/// Rejected experiment configuration; the message names the field.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
  std::string label;
  std::vector<UserSpec> specs;
  PowerLevels levels{1.0, 2.0};
  SchedulerSpec scheduler;
  std::int64_t horizon = 100000;
  std::uint64_t seed = 1;
  std::int64_t trace_every = 1000;
  std::int64_t replications = 1;
};

/// Throws ConfigError on an invalid config; returns non-fatal warnings.
std::vector<std::string> validate(const ExperimentConfig& config);

/// Realized exogenous randomness of one slot.
struct SlotInputs {
  ChannelState channels;
  ArrivalVector arrivals;
};

/// Channel and arrival streams of one replication.
class InputSource {
 public:
  InputSource(std::uint64_t seed, std::uint64_t replication)
      : channel_rng_(seed, replication, StreamTag::Channels),
        arrival_rng_(seed, replication, StreamTag::Arrivals) {}

  void draw(std::span<const UserSpec> specs, SlotInputs& out) {
    sample_channels(specs, channel_rng_, out.channels);
    sample_arrivals(specs, arrival_rng_, out.arrivals);
  }

 private:
  RandomStream channel_rng_;
  RandomStream arrival_rng_;
};

/// The first `slots` inputs a run of (config, replication) would see.
std::vector<SlotInputs> draw_sample_path(const ExperimentConfig& config,
                                         std::uint64_t replication,
                                         std::int64_t slots);

/// Running sums; averages are sums divided by the slot count.
class MetricsAccumulator {
 public:
  explicit MetricsAccumulator(std::size_t users);

  void record(UserIndex i, bool arrival, bool dropped, double power, int served,
              double urgency);
  void end_slot() { ++slots_; }

  std::int64_t slots() const noexcept { return slots_; }
  std::size_t users() const noexcept { return drops_.size(); }

  std::int64_t arrivals(UserIndex i) const { return arrivals_[i]; }
  std::int64_t drops(UserIndex i) const { return drops_[i]; }
  std::int64_t services(UserIndex i) const { return services_[i]; }
  double energy(UserIndex i) const { return energy_[i]; }
  double urgency(UserIndex i) const { return urgency_[i]; }

  double drop_rate(UserIndex i) const { return average(drops_[i]); }
  double avg_power(UserIndex i) const { return average(energy_[i]); }
  double throughput(UserIndex i) const { return average(services_[i]); }
  double avg_urgency(UserIndex i) const { return average(urgency_[i]); }

 private:
  double average(double sum) const {
    return slots_ == 0 ? 0.0 : sum / static_cast<double>(slots_);
  }

  std::vector<std::int64_t> arrivals_;
  std::vector<std::int64_t> drops_;
  std::vector<std::int64_t> services_;
  std::vector<double> energy_;
  std::vector<double> urgency_;
  std::int64_t slots_ = 0;
};

/// Physical state of the system: queues plus accumulated metrics.
struct World {
  std::vector<UserSpec> specs;
  PowerLevels levels;
  std::vector<DeadlineQueue> queues;  ///< one per user; unused for throughput users
  MetricsAccumulator metrics;
  std::vector<std::int64_t> preloaded;  ///< packets present before slot 0
  std::int64_t t = 0;

  World(std::vector<UserSpec> specs, PowerLevels levels);

  /// Replaces user i's queue before the first slot.
  void preload(UserIndex i, DeadlineQueue queue);

  SlotView view(const ChannelState& channels) const {
    return {specs, levels, queues, channels};
  }
};

/// What happened in one slot. Queue and scheduler fields are the values
/// observed at decision time; the rest are the slot's outcomes.
struct SlotRecord {
  std::int64_t t = 0;
  Action action = Action::idle();
  double objective = 0.0;  ///< DPC objective of the action; NaN for LDF
  std::vector<std::uint8_t> dropped;
  std::vector<double> power;
  std::vector<std::uint8_t> served;
  std::vector<double> urgency;
  std::vector<std::size_t> queue_length;
  std::vector<int> head_ttl;  ///< 0 when empty
  std::vector<double> power_backlog;
  std::vector<double> secondary_state;

  /// sum over deadline users of the slot's urgency.
  double cost() const;
};

/// Executes one slot, writing into a caller-owned record to avoid
/// per-slot allocation.
void step(World& world, Policy& policy, const SlotInputs& inputs,
          SlotRecord& record);
SlotRecord step(World& world, Policy& policy, const SlotInputs& inputs);

struct UserAverages {
  double drop_rate = 0.0;
  double avg_power = 0.0;
  double throughput = 0.0;
  double avg_urgency = 0.0;
};

/// Snapshot of one user after `t` slots.
struct TraceRow {
  std::int64_t t = 0;
  UserIndex user = 0;
  std::size_t queue_length = 0;
  int head_ttl = 0;
  double power_backlog = 0.0;
  double secondary_state = 0.0;
  double drop_rate = 0.0;
  double avg_power = 0.0;
  double throughput = 0.0;
  double avg_urgency = 0.0;
};

/// Time averages of sum_i X_i + sum_u Z_u at decision time, over the whole
/// run and over [T/4, T/2) and [T/2, T). NaN for LDF.
struct BacklogStats {
  double mean = 0.0;
  double mean_second_quarter = 0.0;
  double mean_second_half = 0.0;
};

struct RunResult {
  std::uint64_t replication = 0;
  std::int64_t slots = 0;
  std::vector<UserAverages> users;
  double total_cost = 0.0;  ///< sum over slots of sum_r f_r(t)
  BacklogStats backlog;
  std::vector<TraceRow> trace;

  /// sum_r of average urgency.
  double fbar() const;
};

/// Runs one replication. Deterministic in (config, replication).
RunResult run(const ExperimentConfig& config, std::uint64_t replication);

}  // namespace wsched

#endif  // WSCHED_ENGINE_HPP
