#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lsv/maps.hpp"
#include "lsv/rng.hpp"

namespace lsv {

// Finite set of maps with selection probabilities.
class ParameterSpace {
 public:
  enum class Duplicates { Reject, Allow };

  // alpha_cap defaults to the largest alpha in the set.
  ParameterSpace(std::vector<double> alphas, std::vector<double> probs,
                 std::optional<double> alpha_cap = std::nullopt,
                 Duplicates duplicates = Duplicates::Reject);

  static ParameterSpace single(double alpha);

  std::size_t size() const noexcept { return omegas_.size(); }
  MapParam omega(std::size_t i) const { return omegas_.at(i); }
  double prob(std::size_t i) const { return probs_.at(i); }
  const std::vector<MapParam>& omegas() const noexcept { return omegas_; }
  const std::vector<double>& probs() const noexcept { return probs_; }
  double alpha_cap() const noexcept { return alpha_cap_; }

  // Index drawn by inverting the cumulative distribution at u in [0,1).
  std::size_t pick(double u) const noexcept;

  std::string describe() const;

 private:
  std::vector<MapParam> omegas_;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
  double alpha_cap_;
};

class Schedule {
 public:
  enum class Kind { Constant, FixedList, Bernoulli };

  static Schedule constant(MapParam beta);
  static Schedule fixed_list(std::vector<MapParam> maps);
  // One omega drawn from the product measure; `stream` selects among independent draws.
  static Schedule bernoulli(ParameterSpace space, std::uint64_t seed, std::uint64_t stream = 0);

  Kind kind() const noexcept { return kind_; }

  // k is 1-based: symbol_at(1) is the first map applied.
  MapParam symbol_at(std::size_t k) const;
  std::vector<double> alphas(std::size_t n) const;  // alpha_1 .. alpha_n

  double orbit(double x0, std::size_t n) const;
  std::vector<double> orbit_path(double x0, std::size_t n) const;  // x0 .. x_n

  Schedule shift(std::size_t k) const;
  std::optional<std::size_t> length() const noexcept;
  double max_alpha() const noexcept;
  const ParameterSpace* space() const noexcept { return space_ ? &*space_ : nullptr; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  std::string describe() const;

 private:
  Schedule() = default;

  Kind kind_ = Kind::Constant;
  std::vector<MapParam> list_;  // Constant: one entry
  std::optional<ParameterSpace> space_;
  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
  std::uint64_t offset_ = 0;
  CounterRng rng_;
};

// First n symbols of any schedule as a FixedList.
Schedule materialize(const Schedule& s, std::size_t n);
// (T_{w_n}, ..., T_{w_1}); FixedList only.
Schedule reverse_prefix(const Schedule& s, std::size_t n);

}  // namespace lsv
