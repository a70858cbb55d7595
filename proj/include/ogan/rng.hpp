#ifndef OGAN_RNG_HPP
#define OGAN_RNG_HPP

#include <cstdint>

#include "ogan/tensor.hpp"

namespace ogan {

/// Counter-based pseudo-random generator. Each draw hashes (key, counter),
/// so the full state is two 64-bit words and any draw sequence can be
/// reproduced or resumed exactly. Independent streams are derived from a
/// parent key with stream(), giving the data / prior / init split their
/// own non-overlapping sequences.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : key_(mix(seed ^ 0x6A09E667F3BCC909ull)), counter_(0) {}

  /// Derive an independent stream. Does not advance this generator.
  Rng stream(std::uint64_t stream_id) const {
    return Rng(mix(key_ + mix(stream_id + 0xBB67AE8584CAA73Bull)), 0);
  }

  static Rng restore(std::uint64_t key, std::uint64_t counter) { return Rng(key, counter); }
  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

  std::uint64_t next_u64() { return mix(key_ + 0x9E3779B97F4A7C15ull * ++counter_); }

  /// Uniform draw in (0, 1].
  double next_unit() {
    return 1.0 - static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  float next_uniform(float lo, float hi) {
    return lo + static_cast<float>(next_unit() * (static_cast<double>(hi) - lo));
  }

  /// Index in [0, n).
  std::int64_t next_index(std::int64_t n);

  /// Standard normal draw via Box-Muller. Consumes two uniforms; no spare
  /// is cached so the (key, counter) pair remains the whole state.
  float next_gaussian();

  void fill_gaussian(Tensor& t);
  void fill_uniform(Tensor& t, float lo, float hi);

 private:
  Rng(std::uint64_t key, std::uint64_t counter) : key_(key), counter_(counter) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace ogan

#endif  // OGAN_RNG_HPP
