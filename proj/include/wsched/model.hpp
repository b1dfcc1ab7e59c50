#ifndef WSCHED_MODEL_HPP
#define WSCHED_MODEL_HPP

// System model for slotted uplink scheduling: users, two-state channels,
// Bernoulli arrivals, deadline queues and the per-slot action set.
//
// Users are addressed by their 0-based position in the user list. Output
// files print them 1-based.

#include <array>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wsched/rng.hpp"

namespace wsched {

using UserIndex = std::size_t;

/// A caller broke a documented precondition (e.g. served an empty queue).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class UserRole { Deadline, Throughput };

const char* to_string(UserRole role) noexcept;

/**
 * Static parameters of one user.
 *
 * Deadline users carry an arrival probability and a deadline; throughput
 * users are saturated and carry a minimum service rate instead. The
 * role-specific fields are optional so that a field set on the wrong role
 * can be detected rather than silently ignored.
 */
struct UserSpec {
  UserRole role = UserRole::Deadline;
  std::optional<double> arrival_prob;
  std::optional<int> deadline_slots;
  double gamma = 0.0;  ///< average power budget
  std::optional<double> delta;  ///< minimum throughput, packets/slot
  double good_prob = 0.0;

  static UserSpec deadline_user(double arrival_prob, int deadline_slots,
                                double gamma, double good_prob);
  static UserSpec throughput_user(double delta, double gamma,
                                  double good_prob);

  bool is_deadline() const noexcept { return role == UserRole::Deadline; }
  bool is_throughput() const noexcept { return role == UserRole::Throughput; }

  /// Arrival rate; 0 for saturated throughput users.
  double lambda() const noexcept { return arrival_prob.value_or(0.0); }
  /// Deadline in slots. Precondition: deadline user.
  int deadline() const;
  /// Throughput target; 0 for deadline users.
  double target_rate() const noexcept { return delta.value_or(0.0); }
};

/// Transmit power needed for a successful transmission in each channel
/// state. Invariant: 0 < low < high.
class PowerLevels {
 public:
  PowerLevels(double low, double high);

  double low() const noexcept { return low_; }
  double high() const noexcept { return high_; }

  bool operator==(const PowerLevels&) const = default;

 private:
  double low_;
  double high_;
};

/// Throws std::invalid_argument naming the offending field.
void validate_user(const UserSpec& spec, const PowerLevels& levels);

/// Non-fatal remarks about a user set (e.g. one-slot deadlines).
std::vector<std::string> model_warnings(std::span<const UserSpec> specs);

enum class Channel : std::uint8_t { Bad, Good };

/// One channel state per user for one slot.
using ChannelState = std::vector<Channel>;

/// One arrival flag (0/1) per user for one slot; always 0 for throughput users.
using ArrivalVector = std::vector<std::uint8_t>;

/// The only positive power a user may transmit with in the given state.
inline double required_power(Channel c, const PowerLevels& levels) noexcept {
  return c == Channel::Good ? levels.low() : levels.high();
}

/// Selectable power set {0, p} of one user.
using PowerSet = std::array<double, 2>;

std::vector<PowerSet> feasible_powers(const ChannelState& channels,
                                      const PowerLevels& levels);

void sample_channels(std::span<const UserSpec> specs, RandomStream& rng,
                     ChannelState& out);
ChannelState sample_channels(std::span<const UserSpec> specs,
                             RandomStream& rng);

void sample_arrivals(std::span<const UserSpec> specs, RandomStream& rng,
                     ArrivalVector& out);
ArrivalVector sample_arrivals(std::span<const UserSpec> specs,
                              RandomStream& rng);

struct Packet {
  int ttl;  ///< slots left, including the current one
  bool operator==(const Packet&) const = default;
};

/**
 * FIFO of packets with a common deadline.
 *
 * Packets are stored as absolute expiry stamps against an internal clock,
 * so the end-of-slot "every ttl decrements" step is O(1). ttls strictly
 * increase from head to tail and lie in [1, deadline].
 *
 * A default-constructed queue belongs to a saturated user: it is always
 * empty and never advanced.
 */
class DeadlineQueue {
 public:
  DeadlineQueue() = default;
  explicit DeadlineQueue(int deadline);

  /// Builds a queue holding the given ttls (head first). Throws
  /// std::invalid_argument unless they are strictly increasing in [1, m].
  static DeadlineQueue from_ttls(int deadline, std::span<const int> ttls);

  int deadline() const noexcept { return deadline_; }
  std::size_t size() const noexcept { return expiry_.size(); }
  bool empty() const noexcept { return expiry_.empty(); }
  std::optional<int> head_ttl() const noexcept;
  std::vector<Packet> packets() const;

  /**
   * One slot boundary, in order: remove the head if served; drop the head
   * if its ttl is 1; decrement every ttl; append a fresh packet with
   * ttl = deadline on arrival. Returns true iff a packet was dropped.
   * Throws ContractViolation when serving an empty queue, and checks the
   * length-conservation identity on every call.
   */
  bool advance(bool served, bool arrival);

  bool operator==(const DeadlineQueue& other) const;

 private:
  int deadline_ = 0;
  std::int64_t clock_ = 0;
  std::deque<std::int64_t> expiry_;  // ttl = expiry - clock
};

struct QueueTransition {
  DeadlineQueue queue;
  bool dropped;
};

/// Value form of DeadlineQueue::advance.
QueueTransition advance_queue(DeadlineQueue queue, bool served, bool arrival);

/// Slot decision: idle, or one user served at its channel-required power.
class Action {
 public:
  static constexpr UserIndex kNoUser = std::numeric_limits<UserIndex>::max();

  static Action idle() noexcept { return Action(kNoUser, 0.0); }
  static Action serve(UserIndex user, double power) noexcept {
    return Action(user, power);
  }

  bool is_idle() const noexcept { return user_ == kNoUser; }
  /// Served user; kNoUser when idle.
  UserIndex user() const noexcept { return user_; }
  double power() const noexcept { return power_; }

  double power_of(UserIndex i) const noexcept {
    return i == user_ ? power_ : 0.0;
  }
  int service_of(UserIndex i) const noexcept { return i == user_ ? 1 : 0; }

  bool operator==(const Action&) const = default;

 private:
  Action(UserIndex user, double power) noexcept : user_(user), power_(power) {}

  UserIndex user_;
  double power_;
};

std::string to_string(const Action& action);

/// Calls fn(action) for every candidate in the canonical order: Serve(i) for
/// ascending i, skipping deadline users with an empty queue, then Idle.
template <typename Fn>
void for_each_candidate(std::span<const UserSpec> specs,
                        const ChannelState& channels,
                        const PowerLevels& levels,
                        std::span<const DeadlineQueue> queues, Fn&& fn) {
  for (UserIndex i = 0; i < specs.size(); ++i) {
    if (specs[i].is_deadline() && queues[i].empty()) continue;
    fn(Action::serve(i, required_power(channels[i], levels)));
  }
  fn(Action::idle());
}

std::vector<Action> candidate_actions(std::span<const UserSpec> specs,
                                      const ChannelState& channels,
                                      const PowerLevels& levels,
                                      std::span<const DeadlineQueue> queues);

/// Throws ContractViolation unless the action serves an existing user, at
/// the power its channel requires, with something to send.
void check_action(const Action& action, std::span<const UserSpec> specs,
                  const ChannelState& channels, const PowerLevels& levels,
                  std::span<const DeadlineQueue> queues);

}  // namespace wsched

#endif  // WSCHED_MODEL_HPP
