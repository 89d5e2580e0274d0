#include "lsv/rng.hpp"

#include <cmath>
#include <numbers>

namespace lsv {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double to_unit(std::uint32_t hi, std::uint32_t lo) {
  std::uint64_t b = (static_cast<std::uint64_t>(hi) << 32) | lo;
  return static_cast<double>(b >> 11) * 0x1.0p-53;
}

}  // namespace

Philox4x32::Counter Philox4x32::block(Counter ctr, Key key) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

std::uint64_t derive_seed(std::uint64_t seed, StreamDomain domain) noexcept {
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(domain)));
}

std::array<std::uint32_t, 4> CounterRng::bits(std::uint64_t stream, std::uint64_t index) const noexcept {
  Philox4x32::Counter ctr{static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  Philox4x32::Key key{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
  return Philox4x32::block(ctr, key);
}

double CounterRng::uniform(std::uint64_t stream, std::uint64_t index) const noexcept {
  auto b = bits(stream, index);
  return to_unit(b[1], b[0]);
}

double CounterRng::normal(std::uint64_t stream, std::uint64_t index) const noexcept {
  auto b = bits(stream, index);
  double u1 = 1.0 - to_unit(b[1], b[0]);  // (0,1]
  double u2 = to_unit(b[3], b[2]);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace lsv
