#pragma once

#include <array>
#include <cstdint>

namespace roughflow {

// Philox4x32-10 (Salmon et al. 2011)
std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> ctr, std::array<uint32_t, 2> key);

// stream keyed by a 64-bit seed; counters are four 32-bit words
class CounterRng {
 public:
  explicit CounterRng(uint64_t seed) : key_{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32)} {}

  std::array<uint32_t, 4> raw(uint32_t a, uint32_t b, uint32_t c, uint32_t d) const {
    return philox4x32({a, b, c, d}, key_);
  }
  // uniform in (0,1)
  double uniform(uint32_t a, uint32_t b, uint32_t c, uint32_t d) const;
  // standard normal (Box-Muller on one counter block)
  double normal(uint32_t a, uint32_t b, uint32_t c, uint32_t d) const;

 private:
  std::array<uint32_t, 2> key_;
};

// splitmix64 finaliser, used to derive per-sample seeds from (master, tag, index)
uint64_t mix_seed(uint64_t master, uint64_t tag, uint64_t index);

}  // namespace roughflow
