#pragma once

#include <cmath>
#include <compare>

namespace lsv {

// Exponent of one Liverani-Saussol-Vaienti map, 0 < alpha < 1.
class MapParam {
 public:
  explicit MapParam(double alpha);

  double alpha() const noexcept { return alpha_; }

  friend bool operator==(MapParam, MapParam) = default;
  friend auto operator<=>(MapParam, MapParam) = default;

 private:
  double alpha_;
};

struct Preimages {
  double left;   // in [0, 1/2]
  double right;  // in [1/2, 1]
};

// T(x) = x + 2^a x^{1+a} on [0,1/2], 2x - 1 on (1/2,1]. x = 1/2 goes left.
double apply(MapParam p, double x);
double derivative(MapParam p, double x);
Preimages inverse_branches(MapParam p, double x);

namespace detail {

// Unchecked forms for inner loops.
inline double step(double alpha, double x) noexcept {
  double y = x <= 0.5 ? x + x * std::pow(2.0 * x, alpha) : 2.0 * x - 1.0;
  return y < 0.0 ? 0.0 : (y > 1.0 ? 1.0 : y);
}

inline double step_derivative(double alpha, double x) noexcept {
  return x <= 0.5 ? 1.0 + (1.0 + alpha) * std::pow(2.0 * x, alpha) : 2.0;
}

double left_inverse(double alpha, double x) noexcept;

}  // namespace detail
}  // namespace lsv
