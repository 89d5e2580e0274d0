#include "lsv/selftest.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <vector>

#include "lsv/cone.hpp"
#include "lsv/format.hpp"
#include "lsv/kernels/kernels.hpp"
#include "lsv/maps.hpp"
#include "lsv/martingale.hpp"
#include "lsv/montecarlo.hpp"
#include "lsv/rng.hpp"
#include "lsv/stats.hpp"
#include "lsv/transfer.hpp"

namespace lsv {

namespace {

struct Outcome {
  bool ok;
  std::string detail;
};

Outcome check(bool ok, const std::string& what, double value) {
  return {ok, what + "=" + format_double(value)};
}

Outcome suite_maps() {
  double worst = 0.0;
  for (double a : {0.2, 0.5, 0.9}) {
    MapParam p(a);
    for (int i = 1; i < 1000; ++i) {
      double x = i / 1000.0;
      auto pre = inverse_branches(p, x);
      worst = std::max({worst, std::abs(apply(p, pre.left) - x), std::abs(apply(p, pre.right) - x)});
    }
  }
  return check(worst < 1e-12, "max inverse roundtrip error", worst);
}

Outcome suite_rng() {
  using C = Philox4x32::Counter;
  const C zero = Philox4x32::block({0, 0, 0, 0}, {0, 0});
  const C ones = Philox4x32::block({~0u, ~0u, ~0u, ~0u}, {~0u, ~0u});
  const C pi = Philox4x32::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  bool ok = zero == C{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u} &&
            ones == C{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu} &&
            pi == C{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u};
  return {ok, ok ? "known-answer vectors match" : "known-answer mismatch"};
}

Outcome suite_quadrature() {
  auto mesh = Mesh::make(256);
  double one = integrate(DensityGrid::constant(mesh, 1.0));
  double lin = integrate(DensityGrid::from_function(mesh, [](double x) { return x; }));
  double tilde = integrate(Measure::tilde(0.5).weight(mesh));
  double err = std::max({std::abs(one - 1.0), std::abs(lin - 0.5), std::abs(tilde - 2.0)});
  return check(err < 1e-10, "max quadrature error", err);
}

Outcome suite_transfer() {
  auto mesh = Mesh::make(512);
  auto f = DensityGrid::constant(mesh, 1.0);
  MapParam p(0.4);
  double min_value = INFINITY, drift = 0.0, mass = 1.0;
  for (int k = 0; k < 50; ++k) {
    f = transfer_apply(p, f);
    for (double v : f.values()) min_value = std::min(min_value, v);
    double m = integrate(f);
    drift = std::max(drift, std::abs(m - mass));
    mass = m;
  }
  if (min_value <= 0.0) return check(false, "min value", min_value);
  return check(drift <= 1e-8, "max mass drift per step", drift);
}

Outcome suite_cone() {
  auto mesh = Mesh::make(512);
  ConeParams cone(20.0, 0.4);
  ParameterSpace space({0.2, 0.4}, {0.5, 0.5});
  Schedule s = Schedule::bernoulli(space, 7);
  auto f = DensityGrid::constant(mesh, 1.0);
  for (std::size_t k = 1; k <= 40; ++k) {
    f = transfer_apply(s.symbol_at(k), f);
    if (auto c = cone_check(f, cone); !c) return {false, "step " + std::to_string(k) + ": " + c.summary()};
  }
  return {true, "40 steps stay in the cone"};
}

Outcome suite_stationary() {
  ParameterSpace space({0.2, 0.4}, {0.5, 0.5});
  StationaryOptions o;
  o.mesh = Mesh::make(512);
  auto st = stationary_density(space, 1e-9, o);
  double mass = std::abs(integrate(st.density) - 1.0);
  return check(st.residual < 1e-9 && mass < 1e-10, "residual", st.residual);
}

Outcome suite_martingale() {
  auto mesh = Mesh::make(512);
  ParameterSpace space({0.2, 0.4}, {0.5, 0.5});
  Schedule s = Schedule::bernoulli(space, 3);
  MartingaleSequence ms(s, Observable::cosine(), Measure::lebesgue(), 20, mesh, ConeParams(20.0, 0.4));
  double worst = 0.0;
  for (double x0 : {0.1, 0.37, 0.8}) worst = std::max(worst, ms.decomposition_error(x0, 20));
  return check(worst < 1e-8, "decomposition error", worst);
}

Outcome suite_kernels() {
  if (!kernels::available(kernels::Backend::Avx2)) return {true, "avx2 unavailable, scalar only"};
  auto mesh = Mesh::make(300);
  auto plan = mesh->transfer_plan(0.35, 0.0);
  std::vector<double> f(mesh->size()), a(f.size()), b(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::cos(7.0 * mesh->node(i)) + 2.0;
  kernels::table(kernels::Backend::Scalar).stencil_apply(plan->view(), f.data(), a.data());
  kernels::table(kernels::Backend::Avx2).stencil_apply(plan->view(), f.data(), b.data());
  std::size_t diff = 0;
  for (std::size_t i = 0; i < f.size(); ++i) diff += a[i] != b[i];
  return {diff == 0, std::to_string(diff) + " stencil outputs differ"};
}

Outcome suite_worker_independence(unsigned workers) {
  ParameterSpace space({0.3, 0.6}, {0.5, 0.5});
  Observable phi = Observable::identity();
  Measure mu = Measure::lebesgue();
  SumSpec spec;
  spec.phi = &phi;
  spec.annealed = &space;
  spec.omega_seed = 11;
  spec.initial = &mu;
  spec.seed = 5;
  spec.checkpoints = {10, 100};
  spec.samples = 3 * kSampleChunk + 17;
  spec.workers = 1;
  auto one = birkhoff_sums(spec);
  spec.workers = std::max(2u, workers);
  auto many = birkhoff_sums(spec);
  bool same = true;
  for (std::size_t c = 0; c < 2; ++c) {
    auto r1 = one.row(c), r2 = many.row(c);
    for (std::size_t i = 0; i < r1.size(); ++i) same = same && r1[i] == r2[i];
  }
  return {same, same ? "sums identical across worker counts" : "sums differ across worker counts"};
}

Outcome suite_stats() {
  auto ci = stats::wilson_interval(50, 100);
  bool ok = ci.low < 0.5 && ci.high > 0.5 && std::abs(stats::normal_cdf(0.0) - 0.5) < 1e-15;
  return check(ok, "wilson width", ci.high - ci.low);
}

}  // namespace

std::vector<SuiteResult> run_selftest(unsigned workers) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> suites = {
      {"maps", suite_maps},
      {"rng", suite_rng},
      {"quadrature", suite_quadrature},
      {"transfer", suite_transfer},
      {"cone", suite_cone},
      {"stationary", suite_stationary},
      {"martingale", suite_martingale},
      {"kernels", suite_kernels},
      {"workers", [workers] { return suite_worker_independence(workers); }},
      {"stats", suite_stats},
  };
  std::vector<SuiteResult> out;
  for (const auto& [name, fn] : suites) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o{false, ""};
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    out.push_back({name, o.ok, o.detail, ms});
  }
  return out;
}

}  // namespace lsv
