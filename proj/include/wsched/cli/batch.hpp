#ifndef WSCHED_CLI_BATCH_HPP
#define WSCHED_CLI_BATCH_HPP

#include <cstddef>
#include <vector>

#include "wsched/analysis.hpp"
#include "wsched/engine.hpp"

namespace wsched::cli {

struct RunOutput {
  std::size_t config_index = 0;
  RunResult result;
  BoundReport report;
};

/// Runs every (config, replication) pair on a pool of `threads` workers
/// (0 = hardware concurrency). Output order is config-major, then
/// replication, independent of scheduling.
std::vector<RunOutput> run_batch(const std::vector<ExperimentConfig>& configs,
                                 unsigned threads = 0);

}  // namespace wsched::cli

#endif  // WSCHED_CLI_BATCH_HPP
