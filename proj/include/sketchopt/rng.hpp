#pragma once

#include <cstdint>
#include <limits>

namespace sketchopt {

/// Counter-based SplitMix64 stream. Output k of a stream is a bijective mix of
/// key + (k + 1) * golden-gamma, where the key is a hash of
/// (base_seed, stream_index). Identical (base_seed, stream_index) pairs replay
/// identical draws; streams never share state, so trials may run in any order.
///
/// Satisfies UniformRandomBitGenerator and can drive <random> distributions.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t base_seed, std::uint64_t stream_index);

  /// A stream keyed by (base_seed, hash(stream_index, tag)), independent of
  /// this one and of every other tag.
  RngStream substream(std::uint64_t tag) const;

  result_type operator()();

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  std::uint64_t base_seed() const { return base_seed_; }
  std::uint64_t stream_index() const { return stream_index_; }
  std::uint64_t draws() const { return counter_; }

 private:
  std::uint64_t base_seed_;
  std::uint64_t stream_index_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64_mix(std::uint64_t z);

}  // namespace sketchopt
