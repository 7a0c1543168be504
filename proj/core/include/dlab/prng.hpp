#pragma once

#include <cstdint>
#include <string_view>

namespace dlab {

// Counter-based SplitMix64: value(seed, stream, index) is a pure function, so
// samples can be replayed in any order and split by stream.
class CounterRng {
 public:
  static constexpr std::string_view kAlgorithm = "splitmix64-ctr-v1";

  constexpr CounterRng(uint64_t seed, uint64_t stream) : key_(seed ^ mix(stream + 0x632BE59BD9B4E019ULL)) {}

  static constexpr uint64_t mix(uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  constexpr uint64_t at(uint64_t index) const { return mix(key_ + index * 0x9E3779B97F4A7C15ULL); }

  // Uniform integer in [0, bound) by rejection; consumes consecutive counters.
  uint64_t uniform(uint64_t bound, uint64_t& counter) const {
    uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    for (;;) {
      uint64_t v = at(counter++);
      if (v < limit) return v % bound;
    }
  }

 private:
  uint64_t key_;
};

}  // namespace dlab
