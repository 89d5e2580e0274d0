#include "lsv/measure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lsv/format.hpp"
#include "lsv/transfer.hpp"

namespace lsv {

Measure Measure::lebesgue() { return Measure(); }

Measure Measure::tilde(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("Measure::tilde: alpha must lie in (0,1)");
  Measure m;
  m.kind_ = Kind::Tilde;
  m.alpha_ = alpha;
  m.name_ = "tilde(" + format_double(alpha) + ")";
  return m;
}

Measure Measure::stationary(const ParameterSpace& space, double tol, std::shared_ptr<const Mesh> mesh) {
  StationaryOptions opts;
  opts.mesh = std::move(mesh);
  auto st = stationary_density(space, tol, opts);
  return from_density(Kind::Stationary, std::move(st.density), "stationary(" + space.describe() + ")");
}

Measure Measure::single_map_invariant(MapParam beta, double tol, std::shared_ptr<const Mesh> mesh) {
  StationaryOptions opts;
  opts.mesh = std::move(mesh);
  auto st = stationary_density(ParameterSpace::single(beta.alpha()), tol, opts);
  return from_density(Kind::SingleMapInvariant, std::move(st.density),
                      "invariant(" + format_double(beta.alpha()) + ")");
}

Measure Measure::from_density(Kind kind, DensityGrid h, std::string label) {
  if (kind == Kind::Lebesgue || kind == Kind::Tilde) {
    throw std::invalid_argument("Measure::from_density: kind must carry a density");
  }
  Measure m;
  m.kind_ = kind;
  m.name_ = std::move(label);
  const Mesh& mesh = h.mesh();
  const std::size_t n = mesh.size();
  auto cdf = std::make_shared<std::vector<double>>(n + 1, 0.0);
  std::vector<std::pair<double, double>> panels;
  detail::function_panels(mesh, {}, panels);
  const double nd = static_cast<double>(n);
  const int k = mesh.grading();
  for (std::size_t p = 0; p < panels.size(); ++p) {
    auto [r0, r1] = panels[p];
    double half = 0.5 * (r1 - r0), mid = 0.5 * (r1 + r0), acc = 0.0;
    for (int q = 0; q < kGaussPoints; ++q) {
      double r = mid + half * kGaussNodes[q];
      double s = (r + 1.0) / nd;
      acc += kGaussWeights[q] * k * std::pow(s, k - 1) / nd * std::max(0.0, h(mesh.point(r)));
    }
    (*cdf)[p + 1] = (*cdf)[p] + acc * half;
  }
  m.cdf_ = std::move(cdf);
  m.density_ = std::move(h);
  return m;
}

DensityGrid Measure::weight(const std::shared_ptr<const Mesh>& mesh) const {
  switch (kind_) {
    case Kind::Lebesgue:
      return DensityGrid::constant(mesh, 1.0);
    case Kind::Tilde:
      return DensityGrid::power(mesh, alpha_);
    default:
      if (density_->mesh_ptr() == mesh) return *density_;
      return DensityGrid::from_function(mesh, [this](double x) { return (*density_)(x); }, density_->tail());
  }
}

double Measure::total_mass() const noexcept { return kind_ == Kind::Tilde ? 1.0 / (1.0 - alpha_) : 1.0; }

double Measure::mean(const Observable& phi, const std::shared_ptr<const Mesh>& mesh) const {
  auto msh = mesh ? mesh : (density_ ? density_->mesh_ptr() : Mesh::make(4096));
  return integrate_against(phi, weight(msh)) / total_mass();
}

double Measure::sample(double u) const noexcept {
  switch (kind_) {
    case Kind::Lebesgue:
      return u;
    case Kind::Tilde:
      return std::pow(u, 1.0 / (1.0 - alpha_));
    default: {
      const auto& c = *cdf_;
      double target = u * c.back();
      auto it = std::upper_bound(c.begin(), c.end(), target);
      std::size_t p = static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, it - c.begin())) - 1;
      p = std::min(p, c.size() - 2);
      double span = c[p + 1] - c[p];
      double frac = span > 0.0 ? (target - c[p]) / span : 0.0;
      double r = static_cast<double>(p) - 1.0 + std::clamp(frac, 0.0, 1.0);
      return std::min(1.0, density_->mesh().point(r));
    }
  }
}

double integrate_against(const Observable& phi, const DensityGrid& w) {
  if (phi.breakpoints().empty()) {
    auto g = DensityGrid::from_function(w.mesh_ptr(), [&](double x) { return phi(x); }) * w;
    return integrate(g);
  }
  return integrate_function(w.mesh(), [&](double x) { return phi(x) * w(x); }, phi.breakpoints());
}

}  // namespace lsv
