#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "lsv/cone.hpp"
#include "lsv/grid.hpp"
#include "lsv/kernels/kernels.hpp"
#include "lsv/observable.hpp"
#include "lsv/schedule.hpp"

namespace lsv {

// Collocated transfer operator of one map on one mesh:
//   (P f)(x_i) = f(y_L)/T'(y_L) + f(y_R)/2,
// with f read through its interpolant (tail exponent fixed per plan).
struct TransferPlan {
  double alpha = 0.0;
  double tail = 0.0;
  std::vector<double> y_left;
  std::vector<double> inv_dleft;
  std::vector<double> y_right;
  std::vector<std::int32_t> base_left;
  std::vector<std::int32_t> base_right;
  std::array<std::vector<double>, 4> w_left;
  std::array<std::vector<double>, 4> w_right;

  kernels::StencilView view() const noexcept;
};

std::shared_ptr<const TransferPlan> build_transfer_plan(const Mesh& mesh, double alpha, double tail);

DensityGrid transfer_apply(MapParam p, const DensityGrid& f);

// P applied to an arbitrary callable, evaluated exactly at the preimages of
// each node. Used where f jumps at 1/2 or is known in closed form.
template <class F>
DensityGrid transfer_apply_function(MapParam p, const std::shared_ptr<const Mesh>& mesh, F&& f,
                                    double tail = 0.0) {
  auto plan = mesh->transfer_plan(p.alpha(), 0.0);
  std::vector<double> out(mesh->size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = f(plan->y_left[i]) * plan->inv_dleft[i] + 0.5 * f(plan->y_right[i]);
  }
  return DensityGrid(mesh, std::move(out), tail);
}

// P_{w_n} ... P_{w_1} f ; n = 0 returns f.
DensityGrid compose_transfer(const Schedule& s, const DensityGrid& f, std::size_t n);
DensityGrid annealed_apply(const ParameterSpace& space, const DensityGrid& f);

// Transfer operator dual to T on L^1(x^{-a} dx): g^{-1} P(g f), g = x^{-a}.
DensityGrid transfer_apply_weighted(MapParam p, const DensityGrid& f, double a);

struct StationaryOptions {
  std::shared_ptr<const Mesh> mesh;  // default: 4096 nodes
  std::size_t max_steps = 100000;
};

struct StationaryDensity {
  DensityGrid density;  // m(density) = 1
  double residual;      // ||P h - h||_{L^1}
  std::size_t steps;
};

// Fixed point of the annealed operator from 1 by block-Cesaro averaging over
// dyadic windows [2^j, 2^{j+1}). Throws ConvergenceError past max_steps.
StationaryDensity stationary_density(const ParameterSpace& space, double tol, const StationaryOptions& opts = {});

// d[n] = ||P^n (f - m(f))||_{L^1}, n = 0..n_max. f must lie in the cone.
std::vector<double> decay_curve(const Schedule& s, const DensityGrid& f, std::size_t n_max, const ConeParams& c);

// E_m(phi o T^l | (T^k)^{-1} B) as a function of the T^k image:
//   P_{w_k} ... P_{w_{l+1}}(phi P^l 1) / P^k 1.
DensityGrid conditional_expectation(const Schedule& s, const Observable& phi, std::size_t l, std::size_t k,
                                    const ConeParams& c, const std::shared_ptr<const Mesh>& mesh);

}  // namespace lsv
