#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lsv::stats {

inline constexpr double kZ95 = 1.959963984540054;

struct Interval {
  double low;
  double high;
};

// Wilson score interval for a binomial proportion.
Interval wilson_interval(std::size_t successes, std::size_t trials, double z = kZ95);

double normal_cdf(double x) noexcept;
// sup |F_n - Phi| of the sample against N(0,1).
double ks_distance_normal(std::vector<double> samples);

struct LinearFit {
  double slope;
  double intercept;
};
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);
// Fit of log y against log x; all entries must be positive.
LinearFit loglog_fit(std::span<const double> x, std::span<const double> y);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double stderr_mean = 0.0;
  std::size_t count = 0;
};
Moments moments(std::span<const double> v);

}  // namespace lsv::stats
