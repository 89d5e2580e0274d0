#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lsv/measure.hpp"
#include "lsv/observable.hpp"
#include "lsv/rng.hpp"
#include "lsv/schedule.hpp"

namespace lsv {

// Batch Birkhoff sums. Sample i starts at initial.sample(U_i) with U_i drawn
// from (seed, x0_domain, i); in annealed mode it also follows its own omega,
// the Bernoulli schedule (space, omega_seed, stream = i). Each sample depends
// only on its index, so the output is independent of the worker count.
struct SumSpec {
  const Observable* phi = nullptr;
  const Schedule* quenched = nullptr;        // one omega for every sample
  const ParameterSpace* annealed = nullptr;  // or a fresh omega per sample
  std::uint64_t omega_seed = 0;
  const Measure* initial = nullptr;
  std::uint64_t seed = 0;
  StreamDomain x0_domain = StreamDomain::InitialPoint;
  std::span<const double> centering;  // c_k indexed by k; empty for raw sums
  std::vector<std::size_t> checkpoints;  // ascending
  std::size_t samples = 0;
  unsigned workers = 0;
};

class SumMatrix {
 public:
  SumMatrix(std::vector<std::size_t> checkpoints, std::size_t samples)
      : checkpoints_(std::move(checkpoints)), samples_(samples), data_(checkpoints_.size() * samples) {}

  const std::vector<std::size_t>& checkpoints() const noexcept { return checkpoints_; }
  std::size_t samples() const noexcept { return samples_; }
  std::span<const double> row(std::size_t c) const { return {data_.data() + c * samples_, samples_}; }
  std::span<double> row(std::size_t c) { return {data_.data() + c * samples_, samples_}; }

 private:
  std::vector<std::size_t> checkpoints_;
  std::size_t samples_;
  std::vector<double> data_;
};

inline constexpr std::size_t kSampleChunk = 1024;

SumMatrix birkhoff_sums(const SumSpec& spec);

}  // namespace lsv
