#pragma once

#include <cstdint>
#include <random>

namespace algcon {

/// Seeded random stream. Every draw in the library goes through one of these,
/// so a run is reproducible from its seed. `split(id)` derives an independent
/// child stream that depends only on this stream's key and `id`, never on how
/// many numbers have already been consumed.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  RandomStream split(std::uint64_t id) const;

  std::uint64_t key() const noexcept { return key_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// True with probability p (p <= 0 never, p >= 1 always). Always consumes one draw.
  bool bernoulli(double p) { return uniform() < p; }

  double normal();

 private:
  std::uint64_t key_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// splitmix64 finalizer; used for key derivation.
std::uint64_t mix64(std::uint64_t v) noexcept;

}  // namespace algcon
