#include "wsched/model.hpp"

#include <algorithm>
#include <sstream>

namespace wsched {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

const char* to_string(UserRole role) noexcept {
  return role == UserRole::Deadline ? "deadline" : "throughput";
}

UserSpec UserSpec::deadline_user(double arrival_prob, int deadline_slots,
                                 double gamma, double good_prob) {
  UserSpec spec;
  spec.role = UserRole::Deadline;
  spec.arrival_prob = arrival_prob;
  spec.deadline_slots = deadline_slots;
  spec.gamma = gamma;
  spec.good_prob = good_prob;
  return spec;
}

UserSpec UserSpec::throughput_user(double delta, double gamma,
                                   double good_prob) {
  UserSpec spec;
  spec.role = UserRole::Throughput;
  spec.delta = delta;
  spec.gamma = gamma;
  spec.good_prob = good_prob;
  return spec;
}

int UserSpec::deadline() const {
  if (!deadline_slots) {
    throw ContractViolation("deadline requested for a throughput user");
  }
  return *deadline_slots;
}

PowerLevels::PowerLevels(double low, double high) : low_(low), high_(high) {
  require(low > 0.0, "p_low must be positive");
  require(low < high, "p_low must be strictly less than p_high");
}

void validate_user(const UserSpec& spec, const PowerLevels& levels) {
  require(spec.gamma >= 0.0 && spec.gamma <= levels.high(),
          "gamma must lie in [0, p_high]");
  require(is_probability(spec.good_prob), "good_prob must lie in [0, 1]");
  if (spec.is_deadline()) {
    require(!spec.delta.has_value(), "delta is only valid for throughput users");
    require(spec.arrival_prob.has_value(),
            "arrival_prob is required for deadline users");
    require(spec.deadline_slots.has_value(),
            "deadline is required for deadline users");
    require(is_probability(*spec.arrival_prob),
            "arrival_prob must lie in [0, 1]");
    require(*spec.deadline_slots >= 1, "deadline must be at least 1 slot");
  } else {
    require(!spec.arrival_prob.has_value(),
            "arrival_prob is only valid for deadline users");
    require(!spec.deadline_slots.has_value(),
            "deadline is only valid for deadline users");
    require(spec.delta.has_value(), "delta is required for throughput users");
    require(is_probability(*spec.delta), "delta must lie in [0, 1]");
  }
}

std::vector<std::string> model_warnings(std::span<const UserSpec> specs) {
  std::vector<std::string> warnings;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (specs[i].is_deadline() && specs[i].deadline_slots == 1) {
      warnings.push_back("user " + std::to_string(i + 1) +
                         ": deadline = 1 leaves each packet a single "
                         "servable slot (the slot after its arrival)");
    }
  }
  return warnings;
}

std::vector<PowerSet> feasible_powers(const ChannelState& channels,
                                      const PowerLevels& levels) {
  std::vector<PowerSet> sets;
  sets.reserve(channels.size());
  for (Channel c : channels) sets.push_back({0.0, required_power(c, levels)});
  return sets;
}

void sample_channels(std::span<const UserSpec> specs, RandomStream& rng,
                     ChannelState& out) {
  out.resize(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    out[i] = rng.bernoulli(specs[i].good_prob) ? Channel::Good : Channel::Bad;
  }
}

ChannelState sample_channels(std::span<const UserSpec> specs,
                             RandomStream& rng) {
  ChannelState out;
  sample_channels(specs, rng, out);
  return out;
}

void sample_arrivals(std::span<const UserSpec> specs, RandomStream& rng,
                     ArrivalVector& out) {
  out.assign(specs.size(), 0);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (specs[i].is_deadline()) out[i] = rng.bernoulli(specs[i].lambda());
  }
}

ArrivalVector sample_arrivals(std::span<const UserSpec> specs,
                              RandomStream& rng) {
  ArrivalVector out;
  sample_arrivals(specs, rng, out);
  return out;
}

DeadlineQueue::DeadlineQueue(int deadline) : deadline_(deadline) {
  require(deadline >= 1, "deadline must be at least 1 slot");
}

DeadlineQueue DeadlineQueue::from_ttls(int deadline,
                                       std::span<const int> ttls) {
  DeadlineQueue q(deadline);
  int previous = 0;
  for (int ttl : ttls) {
    require(ttl > previous && ttl <= deadline,
            "packet ttls must strictly increase within [1, deadline]");
    q.expiry_.push_back(ttl);
    previous = ttl;
  }
  return q;
}

std::optional<int> DeadlineQueue::head_ttl() const noexcept {
  if (expiry_.empty()) return std::nullopt;
  return static_cast<int>(expiry_.front() - clock_);
}

std::vector<Packet> DeadlineQueue::packets() const {
  std::vector<Packet> out;
  out.reserve(expiry_.size());
  for (std::int64_t e : expiry_) out.push_back({static_cast<int>(e - clock_)});
  return out;
}

bool DeadlineQueue::advance(bool served, bool arrival) {
  if (deadline_ < 1) {
    throw ContractViolation("advance on a queue without a deadline");
  }
  if (served && expiry_.empty()) {
    throw ContractViolation("served an empty deadline queue");
  }
  const std::size_t before = expiry_.size();

  if (served) expiry_.pop_front();
  bool dropped = false;
  if (!expiry_.empty() && expiry_.front() - clock_ == 1) {
    // ttls are strictly increasing, so only the original head can hit 1,
    // and only when it was not served.
    dropped = true;
    expiry_.pop_front();
  }
  ++clock_;
  if (arrival) expiry_.push_back(clock_ + deadline_);

  const std::size_t served_count = served ? 1 : 0;
  const std::size_t expected = (before > served_count ? before - served_count : 0) +
                               (arrival ? 1 : 0) - (dropped ? 1 : 0);
  if (expiry_.size() != expected) {
    throw ContractViolation("queue length conservation violated");
  }
  if (!expiry_.empty() && expiry_.front() - clock_ < 1) {
    throw ContractViolation("expired packet left at queue head");
  }
  return dropped;
}

bool DeadlineQueue::operator==(const DeadlineQueue& other) const {
  return deadline_ == other.deadline_ && packets() == other.packets();
}

QueueTransition advance_queue(DeadlineQueue queue, bool served, bool arrival) {
  const bool dropped = queue.advance(served, arrival);
  return {std::move(queue), dropped};
}

std::string to_string(const Action& action) {
  if (action.is_idle()) return "Idle";
  std::ostringstream os;
  os << "Serve(" << action.user() + 1 << ", " << action.power() << ")";
  return os.str();
}

std::vector<Action> candidate_actions(std::span<const UserSpec> specs,
                                      const ChannelState& channels,
                                      const PowerLevels& levels,
                                      std::span<const DeadlineQueue> queues) {
  std::vector<Action> out;
  out.reserve(specs.size() + 1);
  for_each_candidate(specs, channels, levels, queues,
                     [&](const Action& a) { out.push_back(a); });
  return out;
}

void check_action(const Action& action, std::span<const UserSpec> specs,
                  const ChannelState& channels, const PowerLevels& levels,
                  std::span<const DeadlineQueue> queues) {
  if (action.is_idle()) return;
  const UserIndex i = action.user();
  if (i >= specs.size()) throw ContractViolation("action serves unknown user");
  if (action.power() != required_power(channels[i], levels)) {
    throw ContractViolation("action power inconsistent with channel state of user " +
                            std::to_string(i + 1));
  }
  if (specs[i].is_deadline() && queues[i].empty()) {
    throw ContractViolation("action serves an empty deadline queue");
  }
}

}  // namespace wsched
