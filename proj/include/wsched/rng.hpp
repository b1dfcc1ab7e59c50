#ifndef WSCHED_RNG_HPP
#define WSCHED_RNG_HPP

#include <cstdint>
#include <random>

namespace wsched {

/// Tags for the independent random streams of one run. Channel and arrival
/// draws never share a generator, so swapping the scheduler leaves the
/// sample path untouched.
enum class StreamTag : std::uint64_t {
  Channels = 0x4348414eULL,  // "CHAN"
  Arrivals = 0x41525256ULL,  // "ARRV"
};

/// SplitMix64 finalizer. Used only to turn (seed, replication, tag) into
/// well-separated generator seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed for one named stream of one replication.
std::uint64_t derive_stream_seed(std::uint64_t experiment_seed,
                                 std::uint64_t replication,
                                 StreamTag tag) noexcept;

/**
 * Seeded uniform stream.
 *
 * The engine is std::mt19937_64, whose output sequence is fixed by the C++
 * standard. Doubles are built from the top 53 bits directly instead of via
 * std::uniform_real_distribution, whose algorithm is implementation defined,
 * so sequences are identical across standard libraries and platforms.
 */
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}
  RandomStream(std::uint64_t experiment_seed, std::uint64_t replication,
               StreamTag tag)
      : engine_(derive_stream_seed(experiment_seed, replication, tag)) {}

  /// Uniform double in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// True with probability p. p <= 0 never fires, p >= 1 always fires.
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace wsched

#endif  // WSCHED_RNG_HPP
