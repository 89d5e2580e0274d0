#include "lsv/maps.hpp"

#include <stdexcept>
#include <string>

namespace lsv {

namespace {

void check_point(double x, const char* op) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::domain_error(std::string(op) + ": x=" + std::to_string(x) + " outside [0,1]");
  }
}

}  // namespace

MapParam::MapParam(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("MapParam: alpha=" + std::to_string(alpha) + " must lie in (0,1)");
  }
}

double apply(MapParam p, double x) {
  check_point(x, "apply");
  return detail::step(p.alpha(), x);
}

double derivative(MapParam p, double x) {
  check_point(x, "derivative");
  return detail::step_derivative(p.alpha(), x);
}

Preimages inverse_branches(MapParam p, double x) {
  check_point(x, "inverse_branches");
  return {detail::left_inverse(p.alpha(), x), 0.5 * (x + 1.0)};
}

namespace detail {

double left_inverse(double alpha, double x) noexcept {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 0.5;
  // the root y of y(1 + (2y)^a) = x sits in [x / (1 + (2x)^a), min(x, 1/2)]
  double lo = x / (1.0 + std::pow(2.0 * x, alpha));
  double hi = x < 0.5 ? x : 0.5;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    double tol = hi * 2e-16;
    if (hi - lo <= (tol < 1e-14 ? tol : 1e-14)) break;
    double v = mid + mid * std::pow(2.0 * mid, alpha);
    if (v < x) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail
}  // namespace lsv
