#ifndef WSCHED_ANALYSIS_HPP
#define WSCHED_ANALYSIS_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "wsched/engine.hpp"
#include "wsched/model.hpp"
#include "wsched/schedulers.hpp"

namespace wsched {

/// Worst-case second-moment constant of the drift bound:
/// (N + 1) * p_high^2 / 2 + (R + 1), with N users and R deadline users.
double bound_B(const ExperimentConfig& config);

/// Same constant with the set sizes read as N and R instead of N + 1 and
/// R + 1: N * p_high^2 / 2 + R.
double bound_B_alternative(const ExperimentConfig& config);

/// sum_i X_i^2 / 2 + sum_u Z_u^2 / 2.
double lyapunov_value(const DpcState& state);

// ---------------------------------------------------------------------------
// Clairvoyant offline oracle
// ---------------------------------------------------------------------------

inline constexpr std::size_t kOracleMaxSlots = 14;
inline constexpr std::size_t kOracleMaxUsers = 3;

/// A fully realized tiny instance: users, initial queues and inputs.
struct OracleProblem {
  std::vector<UserSpec> specs;
  PowerLevels levels{1.0, 2.0};
  /// Optional initial queue contents, one per user; empty means all empty.
  std::vector<DeadlineQueue> initial_queues;
  std::vector<SlotInputs> path;
};

/**
 * Result of the offline search.
 *
 * Costs are kept as integers in units of 1/denominator, where denominator is
 * the lcm of the deadlines, so every f_r(t) is an exact integer and
 * comparisons are exact.
 */
struct OracleResult {
  bool feasible = false;
  std::int64_t cost_units = 0;
  std::int64_t denominator = 1;
  std::vector<Action> schedule;
  std::uint64_t nodes = 0;

  double cost() const {
    return static_cast<double>(cost_units) / static_cast<double>(denominator);
  }
};

/// Per-user finite-horizon budgets: sum_t p_i(t) <= gamma_i * T and
/// sum_t mu_u(t) >= floor(delta_u * T).
struct HorizonBudgets {
  std::vector<double> energy_cap;
  std::vector<std::int64_t> min_services;
};

HorizonBudgets horizon_budgets(std::span<const UserSpec> specs,
                               std::int64_t slots);

/// True if a schedule with these per-user totals meets the budgets.
bool within_budgets(const HorizonBudgets& budgets,
                    std::span<const double> energy,
                    std::span<const std::int64_t> services);

/// lcm of all deadlines (1 if none).
std::int64_t cost_denominator(std::span<const UserSpec> specs);

/// f_r scaled by the cost denominator.
std::int64_t urgency_units(std::optional<int> head_ttl, int deadline,
                           bool served, std::int64_t denominator);

/**
 * Minimum realized sum_t sum_r f_r(t) over all action sequences that meet
 * the finite-horizon budgets, by depth-first branch and bound. Among equal
 * minima the first sequence in candidate order is returned. Reports
 * infeasibility instead of throwing.
 *
 * Throws std::invalid_argument when the instance exceeds kOracleMaxSlots or
 * kOracleMaxUsers.
 */
OracleResult offline_oracle(const OracleProblem& problem);

/// Mean per-slot oracle cost over consecutive windows of the run's sample
/// path, each solved from empty queues. A diagnostic proxy only; windows
/// that are infeasible are skipped. Returns nullopt if none is feasible.
std::optional<double> windowed_oracle_proxy(const ExperimentConfig& config,
                                            std::uint64_t replication,
                                            std::size_t window_slots,
                                            std::size_t windows);

// ---------------------------------------------------------------------------
// Bound report
// ---------------------------------------------------------------------------

struct BoundReport {
  double B = 0.0;
  double B_alternative = 0.0;
  double V = 0.0;  ///< NaN for LDF
  double fbar = 0.0;
  std::optional<double> fbar_offline;
  double gap_bound = 0.0;  ///< B / V
  double queue_avg = 0.0;
  double backlog_second_quarter = 0.0;
  double backlog_second_half = 0.0;
  bool backlog_bounded = false;
  /// fbar <= fbar_offline + B/V, when an offline value is available.
  std::optional<bool> gap_check;
};

/// Stability surrogate: the mean backlog over [T/2, T) exceeds the mean over
/// [T/4, T/2) by at most `tolerance` (relative).
bool backlog_bounded(const BacklogStats& stats, double tolerance = 0.10);

BoundReport bound_report(const ExperimentConfig& config, const RunResult& run,
                         std::optional<double> fbar_offline = std::nullopt);

}  // namespace wsched

#endif  // WSCHED_ANALYSIS_HPP
