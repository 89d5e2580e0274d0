#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lsv/maps.hpp"

namespace lsv {

// Real function on [0,1] with declared sup and Lipschitz bounds. Lipschitz
// bounds hold on each piece between `breakpoints`.
class Observable {
 public:
  Observable(std::string name, std::function<double(double)> f, double sup_norm, double lip_norm,
             std::vector<double> breakpoints = {});

  static Observable identity();
  static Observable constant(double c);
  static Observable polynomial(std::vector<double> coeffs);  // c0 + c1 x + ...
  static Observable cosine(double amplitude = 1.0, double cycles = 1.0);  // amp cos(2 pi cycles x)
  static Observable smoothed_indicator(double a, double b, double width);
  // g - g o T_beta; jumps at 1/2 unless g(0) = g(1).
  static Observable coboundary(const Observable& g, MapParam beta);

  double operator()(double x) const { return poly_ ? horner(x) : scale_ * f_(x) + offset_; }
  void eval(std::span<const double> x, std::span<double> out) const;

  Observable shifted(double c) const;  // phi - c
  Observable scaled(double s) const;   // s phi

  const std::string& name() const noexcept { return name_; }
  double sup_norm() const noexcept { return sup_; }
  double lip_norm() const noexcept { return lip_; }
  const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
  bool is_constant() const noexcept { return constant_; }

  // Checks the declared bounds on an evenly spaced sample; returns a
  // description of the first violation or an empty string.
  std::string check_bounds(std::size_t points = 10000) const;

 private:
  Observable() = default;
  double horner(double x) const noexcept {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  std::string name_;
  std::function<double(double)> f_;
  bool poly_ = false;
  std::vector<double> coeffs_;
  double scale_ = 1.0;
  double offset_ = 0.0;
  double sup_ = 0.0;
  double lip_ = 0.0;
  std::vector<double> breakpoints_;
  bool constant_ = false;
};

}  // namespace lsv
