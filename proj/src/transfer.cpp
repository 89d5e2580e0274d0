#include "lsv/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lsv/errors.hpp"
#include "lsv/format.hpp"

namespace lsv {

kernels::StencilView TransferPlan::view() const noexcept {
  kernels::StencilView v;
  v.n = y_left.size();
  v.base_left = base_left.data();
  v.base_right = base_right.data();
  for (int a = 0; a < 4; ++a) {
    v.wl[a] = w_left[a].data();
    v.wr[a] = w_right[a].data();
  }
  return v;
}

namespace {

void fill_stencil(const Mesh& mesh, double y, double factor, double tail, std::int32_t& base,
                  std::array<std::vector<double>, 4>& w, std::size_t i) {
  auto st = mesh.stencil(y);
  base = static_cast<std::int32_t>(st.base);
  if (st.head) {
    w[0][i] = factor * (tail == 0.0 ? 1.0 : std::pow(y / mesh.node(0), tail));
    w[1][i] = w[2][i] = w[3][i] = 0.0;
    return;
  }
  for (int a = 0; a < 4; ++a) {
    double s = tail == 0.0 ? 1.0 : std::pow(y / mesh.node(st.base + a), tail);
    w[a][i] = factor * st.w[a] * s;
  }
}

}  // namespace

std::shared_ptr<const TransferPlan> build_transfer_plan(const Mesh& mesh, double alpha, double tail) {
  MapParam p(alpha);
  const std::size_t n = mesh.size();
  auto plan = std::make_shared<TransferPlan>();
  plan->alpha = alpha;
  plan->tail = tail;
  plan->y_left.resize(n);
  plan->inv_dleft.resize(n);
  plan->y_right.resize(n);
  plan->base_left.resize(n);
  plan->base_right.resize(n);
  for (int a = 0; a < 4; ++a) {
    plan->w_left[a].resize(n);
    plan->w_right[a].resize(n);
  }
  for (std::size_t i = 0; i < n; ++i) {
    double x = mesh.node(i);
    double yl = detail::left_inverse(alpha, x);
    double yr = 0.5 * (x + 1.0);
    double idl = 1.0 / detail::step_derivative(alpha, yl);
    plan->y_left[i] = yl;
    plan->inv_dleft[i] = idl;
    plan->y_right[i] = yr;
    fill_stencil(mesh, yl, idl, tail, plan->base_left[i], plan->w_left, i);
    fill_stencil(mesh, yr, 0.5, tail, plan->base_right[i], plan->w_right, i);
  }
  return plan;
}

DensityGrid transfer_apply(MapParam p, const DensityGrid& f) {
  auto plan = f.mesh().transfer_plan(p.alpha(), f.tail());
  std::vector<double> out(f.size());
  kernels::active().stencil_apply(plan->view(), f.values().data(), out.data());
  return DensityGrid(f.mesh_ptr(), std::move(out), f.tail());
}

DensityGrid compose_transfer(const Schedule& s, const DensityGrid& f, std::size_t n) {
  DensityGrid g = f;
  for (std::size_t k = 1; k <= n; ++k) g = transfer_apply(s.symbol_at(k), g);
  return g;
}

DensityGrid annealed_apply(const ParameterSpace& space, const DensityGrid& f) {
  std::vector<double> acc(f.size(), 0.0);
  for (std::size_t j = 0; j < space.size(); ++j) {
    if (space.prob(j) == 0.0) continue;
    DensityGrid g = transfer_apply(space.omega(j), f);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += space.prob(j) * g.value(i);
  }
  return DensityGrid(f.mesh_ptr(), std::move(acc), f.tail());
}

DensityGrid transfer_apply_weighted(MapParam p, const DensityGrid& f, double a) {
  DensityGrid g = DensityGrid::power(f.mesh_ptr(), a);
  return transfer_apply(p, g * f) / g;
}

StationaryDensity stationary_density(const ParameterSpace& space, double tol, const StationaryOptions& opts) {
  if (!(tol > 0.0)) throw std::invalid_argument("stationary_density: tol must be positive");
  auto mesh = opts.mesh ? opts.mesh : Mesh::make(4096);
  double amax = 0.0;
  for (std::size_t j = 0; j < space.size(); ++j) {
    if (space.prob(j) > 0.0) amax = std::max(amax, space.omega(j).alpha());
  }
  const double tail = -amax;
  const std::size_t n = mesh->size();

  DensityGrid f(mesh, std::vector<double>(n, 1.0), tail);
  std::vector<double> block(n, 0.0);
  std::size_t block_len = 16, in_block = 0, steps = 0;
  double residual = INFINITY;
  while (true) {
    f = annealed_apply(space, f);
    ++steps;
    for (std::size_t i = 0; i < n; ++i) block[i] += f.value(i);
    ++in_block;
    bool last = steps >= opts.max_steps;
    if (in_block == block_len || last) {
      std::vector<double> avg(n);
      for (std::size_t i = 0; i < n; ++i) avg[i] = block[i] / static_cast<double>(in_block);
      DensityGrid h(mesh, std::move(avg), tail);
      residual = l1_norm(annealed_apply(space, h) - h);
      if (residual <= tol) {
        double mass = integrate(h);
        h *= 1.0 / mass;
        return {std::move(h), residual / mass, steps};
      }
      if (last) {
        throw ConvergenceError("stationary_density: residual " + format_double(residual) + " above tol " +
                                   format_double(tol) + " after " + std::to_string(steps) + " steps",
                               residual, steps);
      }
      std::fill(block.begin(), block.end(), 0.0);
      in_block = 0;
      block_len *= 2;
    }
  }
}

std::vector<double> decay_curve(const Schedule& s, const DensityGrid& f, std::size_t n_max, const ConeParams& c) {
  if (auto chk = cone_check(f, c); !chk) {
    throw std::invalid_argument("decay_curve: initial density outside the cone: " + chk.summary());
  }
  DensityGrid g = f - DensityGrid::constant(f.mesh_ptr(), integrate(f));
  std::vector<double> d(n_max + 1);
  d[0] = l1_norm(g);
  for (std::size_t k = 1; k <= n_max; ++k) {
    g = transfer_apply(s.symbol_at(k), g);
    d[k] = l1_norm(g);
  }
  return d;
}

DensityGrid conditional_expectation(const Schedule& s, const Observable& phi, std::size_t l, std::size_t k,
                                    const ConeParams& c, const std::shared_ptr<const Mesh>& mesh) {
  if (l > k) throw std::invalid_argument("conditional_expectation: need l <= k");
  DensityGrid w = DensityGrid::constant(mesh, 1.0);
  for (std::size_t j = 1; j <= l; ++j) w = transfer_apply(s.symbol_at(j), w);
  DensityGrid num = DensityGrid::from_function(mesh, [&](double x) { return phi(x); }) * w;
  if (l < k) {
    num = transfer_apply_function(s.symbol_at(l + 1), mesh, [&](double y) { return phi(y) * w(y); });
    w = transfer_apply(s.symbol_at(l + 1), w);
    for (std::size_t j = l + 2; j <= k; ++j) {
      num = transfer_apply(s.symbol_at(j), num);
      w = transfer_apply(s.symbol_at(j), w);
    }
  }
  const double floor = 0.5 * cone_lower_bound(c);
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(w.value(i) >= floor)) {
      throw GridBreakdown("conditional_expectation: P^k 1 fell to " + format_double(w.value(i)) + " at node " +
                              std::to_string(i),
                          i, w.value(i), floor);
    }
  }
  return num / w;
}

}  // namespace lsv
