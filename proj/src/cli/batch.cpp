#include "wsched/cli/batch.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace wsched::cli {

std::vector<RunOutput> run_batch(const std::vector<ExperimentConfig>& configs,
                                 unsigned threads) {
  std::vector<RunOutput> outputs;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    validate(configs[c]);
    for (std::int64_t r = 0; r < configs[c].replications; ++r) {
      RunOutput o;
      o.config_index = c;
      o.result.replication = static_cast<std::uint64_t>(r);
      outputs.push_back(std::move(o));
    }
  }

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, outputs.size())));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t k = next++; k < outputs.size(); k = next++) {
      try {
        RunOutput& o = outputs[k];
        const ExperimentConfig& config = configs[o.config_index];
        o.result = run(config, o.result.replication);
        o.report = bound_report(config, o.result);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return outputs;
}

}  // namespace wsched::cli
