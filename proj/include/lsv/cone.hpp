#pragma once

#include <string>
#include <vector>

#include "lsv/grid.hpp"
#include "lsv/observable.hpp"

namespace lsv {

// Cone of functions f >= 0, f non-increasing, x^{alpha+1} f non-decreasing,
// f <= a x^{-alpha} m(f).
struct ConeParams {
  ConeParams(double a, double alpha);
  double a;
  double alpha;
};

inline constexpr double kConeSlack = 1e-10;

struct ConeViolation {
  enum class Kind { Negative, Increasing, PowerDecreasing, AboveBound };
  Kind kind;
  std::size_t node;
  double value;
  double limit;
  std::string describe() const;
};

struct ConeCheck {
  bool ok = true;
  std::vector<ConeViolation> violations;  // at most a few per kind
  explicit operator bool() const noexcept { return ok; }
  std::string summary() const;
};

ConeCheck cone_check(const DensityGrid& f, const ConeParams& c);

// D = min{a, [alpha (1+alpha) / a^alpha]^{1/(1-alpha)}}; every f in the cone
// satisfies f >= D m(f).
double cone_lower_bound(const ConeParams& c);

struct ConeSplit {
  DensityGrid psi1;
  DensityGrid psi2;
  double lambda;
  double A;
  double B;
};

// phi h = psi1 - psi2 with both psi in the cone. h must lie in the cone.
ConeSplit cone_split(const Observable& phi, const DensityGrid& h, const ConeParams& c);

}  // namespace lsv
