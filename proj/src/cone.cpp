#include "lsv/cone.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lsv/format.hpp"

namespace lsv {

ConeParams::ConeParams(double a_, double alpha_) : a(a_), alpha(alpha_) {
  if (!(a > 1.0)) throw std::invalid_argument("ConeParams: a must exceed 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("ConeParams: alpha must lie in (0,1)");
}

std::string ConeViolation::describe() const {
  const char* what = "";
  switch (kind) {
    case Kind::Negative: what = "negative value"; break;
    case Kind::Increasing: what = "f increases"; break;
    case Kind::PowerDecreasing: what = "x^(alpha+1) f decreases"; break;
    case Kind::AboveBound: what = "f above a x^-alpha m(f)"; break;
  }
  return std::string(what) + " at node " + std::to_string(node) + " (" + format_double(value) + " vs " +
         format_double(limit) + ")";
}

std::string ConeCheck::summary() const {
  if (ok) return "ok";
  std::string s;
  for (std::size_t i = 0; i < violations.size() && i < 4; ++i) {
    if (i) s += "; ";
    s += violations[i].describe();
  }
  return s;
}

ConeCheck cone_check(const DensityGrid& f, const ConeParams& c) {
  constexpr std::size_t kPerKind = 4;
  ConeCheck out;
  std::size_t counts[4] = {0, 0, 0, 0};
  auto record = [&](ConeViolation::Kind k, std::size_t i, double v, double lim) {
    out.ok = false;
    if (counts[static_cast<int>(k)]++ < kPerKind) out.violations.push_back({k, i, v, lim});
  };

  const std::size_t n = f.size();
  const double scale = sup_norm(f);
  const double m = integrate(f);
  double gmax = 0.0;
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = std::pow(f.node(i), c.alpha + 1.0) * f.value(i);
    gmax = std::max(gmax, std::abs(g[i]));
  }
  for (std::size_t i = 0; i < n; ++i) {
    double v = f.value(i);
    if (v < -kConeSlack * scale) record(ConeViolation::Kind::Negative, i, v, 0.0);
    double bound = c.a * std::pow(f.node(i), -c.alpha) * m;
    if (v > bound * (1.0 + kConeSlack)) record(ConeViolation::Kind::AboveBound, i, v, bound);
    if (i + 1 < n) {
      double nxt = f.value(i + 1);
      if (nxt > v + kConeSlack * std::max(std::abs(v), std::abs(nxt))) {
        record(ConeViolation::Kind::Increasing, i + 1, nxt, v);
      }
      if (g[i + 1] < g[i] - kConeSlack * gmax) record(ConeViolation::Kind::PowerDecreasing, i + 1, g[i + 1], g[i]);
    }
  }
  return out;
}

double cone_lower_bound(const ConeParams& c) {
  double d = std::pow(c.alpha * (1.0 + c.alpha) / std::pow(c.a, c.alpha), 1.0 / (1.0 - c.alpha));
  return std::min(c.a, d);
}

ConeSplit cone_split(const Observable& phi, const DensityGrid& h, const ConeParams& c) {
  if (auto chk = cone_check(h, c); !chk) {
    throw std::invalid_argument("cone_split: h outside the cone: " + chk.summary());
  }
  const double lip = phi.lip_norm();
  const double lambda = -(lip + 1.0);
  const double A = phi.sup_norm() + std::abs(lambda) + 1.0;
  const double mh = integrate(h);

  double b1 = 0.0, lo = INFINITY, hi = -INFINITY;
  const std::size_t n = h.size();
  std::vector<double> v1(n), v2(n);
  for (std::size_t i = 0; i < n; ++i) {
    double x = h.node(i);
    b1 = std::max(b1, x * h.value(i) * ((c.alpha + 2.0) * std::abs(lambda) + lip) / (c.alpha + 1.0));
    double w = phi(x) + lambda * x + A;
    lo = std::min(lo, w);
    hi = std::max(hi, w);
    v1[i] = w * h.value(i);
    v2[i] = (lambda * x + A) * h.value(i);
  }
  // the head of the interpolant runs down to x = 0
  lo = std::min(lo, phi(0.0) + A);
  hi = std::max(hi, phi(0.0) + A);
  const double b2 = c.a / (c.a - 1.0) * (hi - lo) * mh;
  const double B = std::max(b1, b2);
  for (std::size_t i = 0; i < n; ++i) {
    v1[i] += B;
    v2[i] += B;
  }
  const double tail = std::min(h.tail(), 0.0);
  return {DensityGrid(h.mesh_ptr(), std::move(v1), tail), DensityGrid(h.mesh_ptr(), std::move(v2), tail), lambda, A,
          B};
}

}  // namespace lsv
