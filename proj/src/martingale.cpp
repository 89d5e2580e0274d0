#include "lsv/martingale.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lsv/errors.hpp"
#include "lsv/format.hpp"
#include "lsv/transfer.hpp"

namespace lsv {

CenteringTable centering_table(const Schedule& s, const Observable& phi, const Measure& mu, std::size_t n,
                               const std::shared_ptr<const Mesh>& mesh) {
  CenteringTable t;
  t.means.resize(n + 1);
  // every push-forward keeps the mass, so constants are their own means
  if (phi.is_constant()) {
    std::fill(t.means.begin(), t.means.end(), phi(0.0));
    return t;
  }
  DensityGrid w = mu.weight(mesh);
  const double mass = mu.total_mass();
  if (!phi.breakpoints().empty()) {
    for (std::size_t k = 0; k <= n; ++k) {
      if (k) w = transfer_apply(s.symbol_at(k), w);
      t.means[k] = integrate_against(phi, w) / mass;
    }
    return t;
  }
  // smooth phi: fold phi into the quadrature weights once
  const auto& q = mesh->quadrature_weights(w.tail());
  std::vector<double> v(mesh->size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = q[i] * phi(mesh->node(i));
  for (std::size_t k = 0; k <= n; ++k) {
    if (k) w = transfer_apply(s.symbol_at(k), w);
    t.means[k] = pairwise_dot(v, w.values()) / mass;
  }
  return t;
}

double birkhoff_sum(const Schedule& s, const Observable& phi, double x0, std::size_t n, const CenteringTable* table) {
  if (table && table->size() < n + 1) throw std::invalid_argument("birkhoff_sum: centering table too short");
  if (!(x0 >= 0.0 && x0 <= 1.0)) throw std::domain_error("birkhoff_sum: x0 outside [0,1]");
  double x = x0, acc = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    x = detail::step(s.symbol_at(k).alpha(), x);
    acc += phi(x) - (table ? table->means[k] : 0.0);
  }
  return acc;
}

namespace {

void check_floor(const DensityGrid& w, double floor, std::size_t k) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(w.value(i) >= floor)) {
      throw GridBreakdown("martingale: P^" + std::to_string(k) + " w fell to " + format_double(w.value(i)) +
                              " at node " + std::to_string(i) + " (floor " + format_double(floor) + ")",
                          i, w.value(i), floor);
    }
  }
}

}  // namespace

MartingaleSequence::MartingaleSequence(const Schedule& s, const Observable& phi, const Measure& mu, std::size_t n_max,
                                       const std::shared_ptr<const Mesh>& mesh, const ConeParams& cone)
    : schedule_(s), phi_(phi), n_max_(n_max), mass_(mu.total_mass()) {
  if (n_max == 0) throw std::invalid_argument("MartingaleSequence: n_max must be positive");
  table_ = centering_table(s, phi, mu, n_max + 1, mesh);
  const double floor = 0.5 * cone_lower_bound(cone) * mass_;
  weights_.reserve(n_max + 2);
  h_.reserve(n_max + 1);
  weights_.push_back(mu.weight(mesh));
  weights_.push_back(transfer_apply(s.symbol_at(1), weights_[0]));
  check_floor(weights_[1], floor, 1);
  const double tail = weights_[0].tail();
  DensityGrid num(mesh, std::vector<double>(mesh->size(), 0.0), tail);
  h_.push_back(DensityGrid::constant(mesh, 0.0));
  for (std::size_t k = 1; k <= n_max; ++k) {
    const DensityGrid& wk = weights_[k];
    const double ck = table_[k];
    MapParam step = s.symbol_at(k + 1);
    num = transfer_apply_function(
        step, mesh, [&](double y) { return (phi_(y) - ck) * wk(y) + num(y); }, tail);
    DensityGrid next = transfer_apply(step, wk);
    check_floor(next, floor, k + 1);
    weights_.push_back(std::move(next));
    h_.push_back(num / weights_.back());
  }
}

const DensityGrid& MartingaleSequence::H(std::size_t k) const {
  if (k == 0 || k > n_max_ + 1) throw std::out_of_range("MartingaleSequence::H: index out of range");
  return h_[k - 1];
}

const DensityGrid& MartingaleSequence::weight(std::size_t k) const {
  if (k > n_max_ + 1) throw std::out_of_range("MartingaleSequence::weight: index out of range");
  return weights_[k];
}

double MartingaleSequence::psi(std::size_t k, double x) const {
  if (k == 0 || k > n_max_) throw std::out_of_range("MartingaleSequence::psi: index out of range");
  double tx = detail::step(schedule_.symbol_at(k + 1).alpha(), x);
  return phi_(x) - table_[k] + h_[k - 1](x) - h_[k](tx);
}

DensityGrid MartingaleSequence::psi_grid(std::size_t k) const {
  return DensityGrid::from_function(h_[0].mesh_ptr(), [&](double x) { return psi(k, x); });
}

double MartingaleSequence::reverse_martingale_residual(std::size_t k, const Observable& g) const {
  const DensityGrid& w = weight(k);
  const double a = schedule_.symbol_at(k + 1).alpha();
  std::vector<double> bps = phi_.breakpoints();
  bps.push_back(0.5);
  double v = integrate_function(
      w.mesh(), [&](double x) { return psi(k, x) * g(detail::step(a, x)) * w(x); }, bps);
  return std::abs(v) / mass_;
}

double MartingaleSequence::h_norm(std::size_t k, double p) const {
  const DensityGrid& h = H(k);
  DensityGrid hp = h.map([p](double v) { return std::pow(std::abs(v), p); }) * weight(k);
  return std::pow(integrate(hp) / mass_, 1.0 / p);
}

double MartingaleSequence::decomposition_error(double x0, std::size_t n) const {
  if (n == 0 || n > n_max_) throw std::out_of_range("decomposition_error: n out of range");
  double x = x0, s = 0.0, m = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    x = detail::step(schedule_.symbol_at(k).alpha(), x);
    s += phi_(x) - table_[k];
    m += psi(k, x);
  }
  double xn1 = detail::step(schedule_.symbol_at(n + 1).alpha(), x);
  return std::abs(s - m - h_[n](xn1));
}

DensityGrid martingale_H(const Schedule& s, const Observable& phi, std::size_t n, const Measure& mu,
                         const std::shared_ptr<const Mesh>& mesh, const ConeParams& cone) {
  if (n == 0) throw std::invalid_argument("martingale_H: n starts at 1");
  if (n == 1) return DensityGrid::constant(mesh, 0.0);
  MartingaleSequence seq(s, phi, mu, n - 1, mesh, cone);
  return seq.H(n);
}

DensityGrid martingale_H_closed(const Schedule& s, const Observable& phi, std::size_t n, const Measure& mu,
                                const std::shared_ptr<const Mesh>& mesh) {
  if (n == 0) throw std::invalid_argument("martingale_H_closed: n starts at 1");
  CenteringTable table = centering_table(s, phi, mu, n, mesh);
  std::vector<DensityGrid> w{mu.weight(mesh)};
  for (std::size_t k = 1; k <= n; ++k) w.push_back(transfer_apply(s.symbol_at(k), w.back()));
  const double tail = w[0].tail();
  std::vector<double> acc(mesh->size(), 0.0);
  for (std::size_t j = 1; j + 1 <= n; ++j) {
    const double cj = table[j];
    const DensityGrid& wj = w[j];
    DensityGrid term = transfer_apply_function(
        s.symbol_at(j + 1), mesh, [&](double y) { return (phi(y) - cj) * wj(y); }, tail);
    for (std::size_t k = j + 2; k <= n; ++k) term = transfer_apply(s.symbol_at(k), term);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += term.value(i);
  }
  return DensityGrid(mesh, std::move(acc), tail) / w[n];
}

}  // namespace lsv
