#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lsv/grid.hpp"
#include "lsv/observable.hpp"
#include "lsv/schedule.hpp"

namespace lsv {

// Reference measure on [0,1]: Lebesgue m, m~ = x^{-alpha} dx, or a density
// grid (annealed stationary mu, or the invariant density of one map).
class Measure {
 public:
  enum class Kind { Lebesgue, Tilde, Stationary, SingleMapInvariant };

  static Measure lebesgue();
  static Measure tilde(double alpha);
  static Measure stationary(const ParameterSpace& space, double tol = 1e-9,
                            std::shared_ptr<const Mesh> mesh = nullptr);
  static Measure single_map_invariant(MapParam beta, double tol = 1e-9, std::shared_ptr<const Mesh> mesh = nullptr);
  // Density must have unit Lebesgue mass.
  static Measure from_density(Kind kind, DensityGrid h, std::string label);

  Kind kind() const noexcept { return kind_; }
  double alpha() const noexcept { return alpha_; }
  const DensityGrid* density() const noexcept { return density_ ? &*density_ : nullptr; }
  const std::string& name() const noexcept { return name_; }

  // Density of the measure with respect to Lebesgue, sampled on `mesh`.
  DensityGrid weight(const std::shared_ptr<const Mesh>& mesh) const;
  double total_mass() const noexcept;
  // int phi d(measure) / total mass
  double mean(const Observable& phi, const std::shared_ptr<const Mesh>& mesh = nullptr) const;

  // Inverse-CDF map from u in [0,1) to a point distributed as the
  // normalized measure.
  double sample(double u) const noexcept;

 private:
  Measure() = default;

  Kind kind_ = Kind::Lebesgue;
  double alpha_ = 0.0;
  std::optional<DensityGrid> density_;
  std::string name_ = "lebesgue";
  std::shared_ptr<const std::vector<double>> cdf_;  // cumulative mass at r = -1, 0, ..., N-1
};

// int phi w dx for an observable against a grid weight; piecewise-aware
// when phi declares breakpoints.
double integrate_against(const Observable& phi, const DensityGrid& w);

}  // namespace lsv
