#include "sketchopt/rng.hpp"

namespace sketchopt {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

RngStream::RngStream(std::uint64_t base_seed, std::uint64_t stream_index)
    : base_seed_(base_seed),
      stream_index_(stream_index),
      key_(splitmix64_mix(splitmix64_mix(base_seed + kGolden) ^
                          splitmix64_mix(stream_index * kGolden + 0x632be59bd9b4e019ULL))) {}

RngStream RngStream::substream(std::uint64_t tag) const {
  const std::uint64_t child = splitmix64_mix(stream_index_ ^ splitmix64_mix(tag + kGolden));
  return RngStream(base_seed_, child);
}

RngStream::result_type RngStream::operator()() {
  ++counter_;
  return splitmix64_mix(key_ + counter_ * kGolden);
}

}  // namespace sketchopt
