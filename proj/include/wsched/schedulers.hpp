#ifndef WSCHED_SCHEDULERS_HPP
#define WSCHED_SCHEDULERS_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wsched/model.hpp"

namespace wsched {

/// Everything a scheduler may observe at decision time in one slot.
struct SlotView {
  std::span<const UserSpec> specs;
  const PowerLevels& levels;
  std::span<const DeadlineQueue> queues;
  const ChannelState& channels;
};

/**
 * Per-slot urgency of a deadline queue.
 *
 * (m - (head_ttl - 1)) / m while the head packet waits, 0 when the queue
 * is served or empty. Equals 1 exactly when the head is about to be
 * dropped.
 */
double urgency_cost(std::optional<int> head_ttl, int deadline, bool served);

// ---------------------------------------------------------------------------
// Drift-plus-penalty control
// ---------------------------------------------------------------------------

/// Virtual queues of the drift-plus-penalty controller.
struct DpcState {
  std::vector<double> X;  ///< power-budget backlog, one per user
  std::vector<double> Z;  ///< throughput backlog; deadline-user entries stay 0
  double V = 1.0;         ///< weight of the urgency penalty, > 0

  /// All-zero queues for the given user count. Throws if V <= 0.
  static DpcState initial(std::size_t users, double V);
};

/// sum_i X_i (p_i - gamma_i) + sum_u Z_u (delta_u - mu_u) + V sum_r f_r for
/// the action's induced p, mu and f. Throws ContractViolation on an action
/// that is not a valid candidate.
double dpc_objective(const Action& action, const DpcState& state,
                     const SlotView& view);

struct DpcDecision {
  Action action;
  double objective;
};

/// First candidate (canonical order) with the smallest objective; a later
/// candidate replaces the incumbent only when strictly better.
DpcDecision dpc_decide(const DpcState& state, const SlotView& view);

/// X_i <- max(X_i - gamma_i, 0) + p_i and Z_u <- max(Z_u - mu_u, 0) + delta_u.
void dpc_update_in_place(DpcState& state, const Action& action,
                         std::span<const UserSpec> specs);
DpcState dpc_update(DpcState state, const Action& action,
                    std::span<const UserSpec> specs);

// ---------------------------------------------------------------------------
// Largest debt first
// ---------------------------------------------------------------------------

/// Throughput debts. y_i = t * q_i - services_i, kept in closed form from
/// integer service counts so no rounding accumulates over long runs.
struct LdfState {
  std::vector<double> y;
  std::vector<double> q;  ///< delta for throughput users, lambda for deadline users
  std::vector<std::int64_t> services;
  std::int64_t t = 0;

  static LdfState initial(std::span<const UserSpec> specs);
};

void ldf_update_in_place(LdfState& state, const Action& action);
LdfState ldf_update(LdfState state, const Action& action);

/// Serves the eligible user (throughput users, or deadline users with a
/// packet) with the largest positive debt, lowest index on ties; Idle if no
/// eligible user is in debt. Ignores power budgets.
Action ldf_decide(const LdfState& state, const SlotView& view);

// ---------------------------------------------------------------------------
// Runtime policy interface used by the slot engine
// ---------------------------------------------------------------------------

enum class SchedulerKind { Dpc, Ldf };

struct SchedulerSpec {
  SchedulerKind kind = SchedulerKind::Dpc;
  double V = 100.0;  ///< ignored by LDF

  bool operator==(const SchedulerSpec&) const = default;
};

std::string to_string(SchedulerKind kind);
std::optional<SchedulerKind> parse_scheduler_kind(const std::string& name);

class Policy {
 public:
  virtual ~Policy() = default;

  virtual SchedulerKind kind() const noexcept = 0;
  virtual Action decide(const SlotView& view) = 0;
  /// Applies the executed action to the scheduler's internal state.
  virtual void update(const Action& action, std::span<const UserSpec> specs) = 0;

  /// X_i for DPC; NaN for schedulers without a power queue.
  virtual double power_backlog(UserIndex i) const = 0;
  /// Z_u for DPC (NaN for deadline users), y_i for LDF.
  virtual double secondary_state(UserIndex i) const = 0;
  /// sum_i X_i + sum_u Z_u for DPC; NaN otherwise.
  virtual double virtual_backlog() const = 0;
};

class DpcPolicy final : public Policy {
 public:
  DpcPolicy(std::span<const UserSpec> specs, double V);

  SchedulerKind kind() const noexcept override { return SchedulerKind::Dpc; }
  Action decide(const SlotView& view) override;
  void update(const Action& action, std::span<const UserSpec> specs) override;
  double power_backlog(UserIndex i) const override { return state_.X[i]; }
  double secondary_state(UserIndex i) const override;
  double virtual_backlog() const override;

  const DpcState& state() const noexcept { return state_; }
  /// Objective of the most recent decision.
  double last_objective() const noexcept { return last_objective_; }

 private:
  DpcState state_;
  std::vector<bool> throughput_;
  double last_objective_ = 0.0;
};

class LdfPolicy final : public Policy {
 public:
  explicit LdfPolicy(std::span<const UserSpec> specs);

  SchedulerKind kind() const noexcept override { return SchedulerKind::Ldf; }
  Action decide(const SlotView& view) override;
  void update(const Action& action, std::span<const UserSpec> specs) override;
  double power_backlog(UserIndex i) const override;
  double secondary_state(UserIndex i) const override { return state_.y[i]; }
  double virtual_backlog() const override;

  const LdfState& state() const noexcept { return state_; }

 private:
  LdfState state_;
};

std::unique_ptr<Policy> make_policy(const SchedulerSpec& spec,
                                    std::span<const UserSpec> specs);

}  // namespace wsched

#endif  // WSCHED_SCHEDULERS_HPP
