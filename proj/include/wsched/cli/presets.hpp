#ifndef WSCHED_CLI_PRESETS_HPP
#define WSCHED_CLI_PRESETS_HPP

#include <optional>
#include <string>
#include <vector>

#include "wsched/engine.hpp"

namespace wsched::cli {

/**
 * Named experiment sets. All use p_low = 1, p_high = 2, 10^5 slots,
 * 20 replications and seed 1 unless overridden.
 *
 *  fig2-tradeoff     two users (deadline: lambda 0.5, m 10, gamma 0.7;
 *                    throughput: delta 0.4, gamma 0.65), good_prob 0.4,
 *                    DPC with V in {10, 100, 1000}.
 *  fig3-droprate     one deadline user (lambda 0.35, m in {10, 30}) plus
 *                    K in 1..6 throughput users (delta 0.1 each), gamma 2
 *                    and good_prob 0.9 for everyone; DPC (V 100) and LDF.
 *  fig4-throughput   same grid as fig3-droprate, reported as total
 *                    throughput of the throughput users.
 *  fig5-convergence  one deadline user (lambda 0.35, m 100) plus six
 *                    throughput users as above; DPC (V 100) and LDF,
 *                    trace every 200 slots.
 *  custom            configs come from --config.
 */
enum class Preset { Fig2Tradeoff, Fig3DropRate, Fig4Throughput, Fig5Convergence, Custom };

std::string to_string(Preset preset);
std::optional<Preset> parse_preset(const std::string& name);

/// Expands a preset into its configs. Throws ConfigError for Custom.
std::vector<ExperimentConfig> expand_preset(Preset preset);

/// Building blocks shared by presets and tests.
ExperimentConfig fig2_config(double V);
ExperimentConfig multiuser_config(int deadline, int throughput_users,
                                  SchedulerSpec scheduler);

inline constexpr double kMultiuserDelta = 0.1;
inline constexpr double kDefaultV = 100.0;

}  // namespace wsched::cli

#endif  // WSCHED_CLI_PRESETS_HPP
