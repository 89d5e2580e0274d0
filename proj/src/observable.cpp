#include "lsv/observable.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lsv/format.hpp"

namespace lsv {

Observable::Observable(std::string name, std::function<double(double)> f, double sup_norm, double lip_norm,
                       std::vector<double> breakpoints)
    : name_(std::move(name)), f_(std::move(f)), sup_(sup_norm), lip_(lip_norm),
      breakpoints_(std::move(breakpoints)) {
  if (!f_) throw std::invalid_argument("Observable: empty function");
  if (!(sup_ >= 0.0) || !(lip_ >= 0.0)) throw std::invalid_argument("Observable: negative bound");
  std::sort(breakpoints_.begin(), breakpoints_.end());
}

Observable Observable::polynomial(std::vector<double> coeffs) {
  if (coeffs.empty()) coeffs.push_back(0.0);
  Observable o;
  o.poly_ = true;
  o.coeffs_ = coeffs;
  o.name_ = "poly(";
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (i) o.name_ += ',';
    o.name_ += format_double(coeffs[i]);
    o.sup_ += std::abs(coeffs[i]);
    o.lip_ += static_cast<double>(i) * std::abs(coeffs[i]);
  }
  o.name_ += ')';
  o.constant_ = std::all_of(coeffs.begin() + 1, coeffs.end(), [](double c) { return c == 0.0; });
  return o;
}

Observable Observable::identity() {
  Observable o = polynomial({0.0, 1.0});
  o.name_ = "identity";
  return o;
}

Observable Observable::constant(double c) {
  Observable o = polynomial({c});
  o.name_ = "const(" + format_double(c) + ")";
  return o;
}

Observable Observable::cosine(double amplitude, double cycles) {
  const double w = 2.0 * std::numbers::pi * cycles;
  Observable o("cosine(" + format_double(amplitude) + "," + format_double(cycles) + ")",
               [w](double x) { return std::cos(w * x); }, std::abs(amplitude), std::abs(amplitude * w));
  o.scale_ = amplitude;
  o.constant_ = amplitude == 0.0 || cycles == 0.0;
  return o;
}

Observable Observable::smoothed_indicator(double a, double b, double width) {
  if (!(a < b) || !(width > 0.0)) throw std::invalid_argument("smoothed_indicator: need a < b, width > 0");
  return Observable("indicator(" + format_double(a) + "," + format_double(b) + "," + format_double(width) + ")",
                    [a, b, width](double x) { return 0.5 * (std::tanh((x - a) / width) - std::tanh((x - b) / width)); },
                    1.0, 1.0 / width);
}

Observable Observable::coboundary(const Observable& g, MapParam beta) {
  const double t_lip = 2.0 + beta.alpha();
  return Observable("coboundary(" + g.name() + "," + format_double(beta.alpha()) + ")",
                    [g, a = beta.alpha()](double x) { return g(x) - g(detail::step(a, x)); },
                    2.0 * g.sup_norm(), g.lip_norm() * (1.0 + t_lip), {0.5});
}

void Observable::eval(std::span<const double> x, std::span<double> out) const {
  const std::size_t n = x.size();
  if (poly_) {
    const std::size_t deg = coeffs_.size() - 1;
    const double top = coeffs_[deg];
    for (std::size_t i = 0; i < n; ++i) out[i] = top;
    for (std::size_t d = deg; d-- > 0;) {
      const double c = coeffs_[d];
      for (std::size_t i = 0; i < n; ++i) out[i] = out[i] * x[i] + c;
    }
    return;
  }
  for (std::size_t i = 0; i < n; ++i) out[i] = scale_ * f_(x[i]) + offset_;
}

Observable Observable::shifted(double c) const {
  Observable o = *this;
  if (poly_) {
    o.coeffs_[0] -= c;
  } else {
    o.offset_ -= c;
  }
  o.sup_ = sup_ + std::abs(c);
  o.name_ = name_ + "-" + format_double(c);
  return o;
}

Observable Observable::scaled(double s) const {
  Observable o = *this;
  if (poly_) {
    for (auto& c : o.coeffs_) c *= s;
  } else {
    o.scale_ *= s;
    o.offset_ *= s;
  }
  o.sup_ = sup_ * std::abs(s);
  o.lip_ = lip_ * std::abs(s);
  o.name_ = format_double(s) + "*" + name_;
  o.constant_ = constant_ || s == 0.0;
  return o;
}

std::string Observable::check_bounds(std::size_t points) const {
  const double h = 1.0 / static_cast<double>(points - 1);
  double prev = (*this)(0.0);
  for (std::size_t i = 0; i < points; ++i) {
    double x = std::min(1.0, static_cast<double>(i) * h);
    double v = (*this)(x);
    if (!std::isfinite(v)) return name_ + ": non-finite value at x=" + format_double(x);
    if (std::abs(v) > sup_ * (1.0 + 1e-12) + 1e-300) {
      return name_ + ": |f(" + format_double(x) + ")|=" + format_double(std::abs(v)) + " exceeds sup bound " +
             format_double(sup_);
    }
    if (i > 0) {
      double x0 = x - h;
      bool straddles = std::any_of(breakpoints_.begin(), breakpoints_.end(),
                                   [&](double b) { return b >= x0 && b <= x; });
      if (!straddles && std::abs(v - prev) > lip_ * h * (1.0 + 1e-6) + 1e-12) {
        return name_ + ": slope " + format_double(std::abs(v - prev) / h) + " near x=" + format_double(x) +
               " exceeds Lipschitz bound " + format_double(lip_);
      }
    }
    prev = v;
  }
  return {};
}

}  // namespace lsv
