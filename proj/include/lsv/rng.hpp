#pragma once

#include <array>
#include <cstdint>

namespace lsv {

// Philox4x32-10 (Salmon et al., Random123). Stateless: output is a pure
// function of (counter, key), so any sample or step can be drawn out of order.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key) noexcept;
};

// Independent domains carved out of one user seed.
enum class StreamDomain : std::uint64_t {
  Schedule = 0x5343484544554c45ull,
  InitialPoint = 0x494e495450543030ull,
  InitialPointAux = 0x494e495450543031ull,
  Calibration = 0x43414c4942524154ull,
  Fixture = 0x4649585455524553ull,
};

std::uint64_t derive_seed(std::uint64_t seed, StreamDomain domain) noexcept;

// Counter-based uniform source: (seed, stream, index) -> double in [0,1).
class CounterRng {
 public:
  CounterRng() = default;
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}
  CounterRng(std::uint64_t seed, StreamDomain domain) : seed_(derive_seed(seed, domain)) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::array<std::uint32_t, 4> bits(std::uint64_t stream, std::uint64_t index) const noexcept;
  double uniform(std::uint64_t stream, std::uint64_t index) const noexcept;
  // Standard normal via Box-Muller on two uniforms from the same block.
  double normal(std::uint64_t stream, std::uint64_t index) const noexcept;

 private:
  std::uint64_t seed_ = 0;
};

}  // namespace lsv
