#include "roughflow/philox.hpp"

#include <cmath>
#include <numbers>

namespace roughflow {

namespace {
constexpr uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
constexpr uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;

inline void mulhilo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
  const uint64_t p = static_cast<uint64_t>(a) * b;
  hi = static_cast<uint32_t>(p >> 32);
  lo = static_cast<uint32_t>(p);
}

// 53-bit uniform in (0,1) from two words
inline double to_unit(uint32_t hi, uint32_t lo) {
  const uint64_t m = (static_cast<uint64_t>(hi) << 21) ^ (lo >> 11);
  return (static_cast<double>(m & ((1ull << 53) - 1)) + 0.5) * 0x1.0p-53;
}
}  // namespace

std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> c, std::array<uint32_t, 2> k) {
  for (int r = 0; r < 10; ++r) {
    uint32_t hi0, lo0, hi1, lo1;
    mulhilo(M0, c[0], hi0, lo0);
    mulhilo(M1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += W0;
    k[1] += W1;
  }
  return c;
}

double CounterRng::uniform(uint32_t a, uint32_t b, uint32_t c, uint32_t d) const {
  const auto r = raw(a, b, c, d);
  return to_unit(r[0], r[1]);
}

double CounterRng::normal(uint32_t a, uint32_t b, uint32_t c, uint32_t d) const {
  const auto r = raw(a, b, c, d);
  const double u1 = to_unit(r[0], r[1]), u2 = to_unit(r[2], r[3]);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

uint64_t mix_seed(uint64_t master, uint64_t tag, uint64_t index) {
  uint64_t z = master ^ (tag * 0x9E3779B97F4A7C15ull) ^ (index * 0xD1B54A32D192ED03ull);
  for (int i = 0; i < 2; ++i) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z ^= z >> 31;
  }
  return z;
}

}  // namespace roughflow
