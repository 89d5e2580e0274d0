#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "lsv/errors.hpp"
#include "lsv/measure.hpp"
#include "lsv/rng.hpp"
#include "lsv/stats.hpp"
#include "lsv/transfer.hpp"

namespace lsv {
namespace {

// Positive combination of (x + delta)^-gamma bumps with gamma <= alpha plus
// a constant: a member of the cone for a = 20.
struct ConeFunction {
  double c0;
  double c[3], delta[3], gamma[3];
  double operator()(double x) const {
    double v = c0;
    for (int j = 0; j < 3; ++j) v += c[j] * std::pow(x + delta[j], -gamma[j]);
    return v;
  }
};

ConeFunction random_cone_function(std::uint64_t i, double alpha) {
  CounterRng r(31, StreamDomain::Fixture);
  ConeFunction f;
  f.c0 = r.uniform(i, 0);
  for (int j = 0; j < 3; ++j) {
    f.c[j] = r.uniform(i, 1 + 3 * j);
    f.delta[j] = std::pow(10.0, -3.0 * r.uniform(i, 2 + 3 * j) - 1.0);
    f.gamma[j] = alpha * r.uniform(i, 3 + 3 * j);
  }
  return f;
}

TEST(Transfer, ClosedFormAtOne) {
  auto mesh = Mesh::make(4096);
  for (double a : {0.2, 0.5, 0.8}) {
    auto p1 = transfer_apply(MapParam(a), DensityGrid::constant(mesh, 1.0));
    EXPECT_NEAR(p1.value(mesh->size() - 1), 0.5 + 1.0 / (2.0 + a), 1e-8) << a;
  }
}

TEST(Transfer, ZeroMapsToZero) {
  auto z = transfer_apply(MapParam(0.4), DensityGrid::constant(Mesh::make(512), 0.0));
  for (double v : z.values()) ASSERT_EQ(v, 0.0);
}

TEST(Transfer, MatchesPointwiseFormula) {
  auto mesh = Mesh::make(512);
  MapParam p(0.35);
  auto f = [](double x) { return 1.0 + x * x; };
  auto g = transfer_apply(p, DensityGrid::from_function(mesh, f));
  for (std::size_t i = 0; i < mesh->size(); i += 31) {
    auto pre = inverse_branches(p, mesh->node(i));
    double exact = f(pre.left) / derivative(p, pre.left) + 0.5 * f(pre.right);
    ASSERT_NEAR(g.value(i), exact, 1e-9);
  }
}

TEST(Transfer, MassConservedPerApplication) {
  auto mesh = Mesh::make(512);
  ParameterSpace space({0.15, 0.4, 0.7}, {0.3, 0.3, 0.4});
  auto s = Schedule::bernoulli(space, 8);
  auto f = DensityGrid::from_function(mesh, random_cone_function(0, 0.7));
  double mass = integrate(f);
  for (std::size_t k = 1; k <= 100; ++k) {
    f = transfer_apply(s.symbol_at(k), f);
    double m = integrate(f);
    ASSERT_LE(std::abs(m - mass), 1e-8) << "step " << k;
    mass = m;
  }
}

TEST(Transfer, ComposeMatchesRepeatedApply) {
  auto mesh = Mesh::make(256);
  auto s = Schedule::fixed_list({MapParam(0.3), MapParam(0.6), MapParam(0.1)});
  auto one = DensityGrid::constant(mesh, 1.0);
  auto f0 = compose_transfer(s, one, 0);
  for (std::size_t i = 0; i < mesh->size(); ++i) ASSERT_EQ(f0.value(i), 1.0);
  auto c = compose_transfer(s, one, 3);
  auto r = transfer_apply(MapParam(0.1), transfer_apply(MapParam(0.6), transfer_apply(MapParam(0.3), one)));
  for (std::size_t i = 0; i < mesh->size(); ++i) ASSERT_EQ(c.value(i), r.value(i));
  EXPECT_NEAR(integrate(c), 1.0, 3e-8);
}

TEST(Transfer, AnnealedIsConvexCombination) {
  auto mesh = Mesh::make(256);
  auto f = DensityGrid::from_function(mesh, random_cone_function(1, 0.5));
  ParameterSpace single = ParameterSpace::single(0.3);
  auto a = annealed_apply(single, f);
  auto t = transfer_apply(MapParam(0.3), f);
  for (std::size_t i = 0; i < mesh->size(); ++i) ASSERT_EQ(a.value(i), t.value(i));

  ParameterSpace two({0.2, 0.5}, {0.25, 0.75});
  auto m = annealed_apply(two, f);
  auto ref = 0.25 * transfer_apply(MapParam(0.2), f) + 0.75 * transfer_apply(MapParam(0.5), f);
  for (std::size_t i = 0; i < mesh->size(); ++i) ASSERT_NEAR(m.value(i), ref.value(i), 1e-14 * ref.value(i));
  EXPECT_NEAR(integrate(m), integrate(f), 1e-8);
  auto z = annealed_apply(two, DensityGrid::constant(mesh, 0.0));
  for (double v : z.values()) ASSERT_EQ(v, 0.0);
}

TEST(Transfer, Positivity) {
  auto mesh = Mesh::make(512);
  for (std::uint64_t i = 0; i < 5; ++i) {
    auto f = DensityGrid::from_function(mesh, random_cone_function(i, 0.6));
    auto g = transfer_apply(MapParam(0.6), f);
    for (double v : g.values()) ASSERT_GT(v, 0.0);
  }
}

// int (P f) g dm against int f (g o T) dm, the latter by split quadrature
// on the doubled mesh with f and g evaluated exactly.
TEST(Transfer, DualitySuite) {
  const std::size_t n = 512;
  auto mesh = Mesh::make(n);
  auto fine = Mesh::make(2 * n);
  std::vector<std::function<double(double)>> tests = {
      [](double) { return 1.0; },
      [](double x) { return x; },
      [](double x) { return x * x; },
      [](double x) { return std::cos(2.0 * M_PI * x); },
      [](double x) { return std::tanh((x - 0.3) / 0.05); },
  };
  std::vector<double> sup = {1.0, 1.0, 1.0, 1.0, 1.0};
  const double bp[1] = {0.5};
  for (std::uint64_t pair = 0; pair < 20; ++pair) {
    double alpha = 0.1 + 0.8 * CounterRng(4, StreamDomain::Fixture).uniform(0, pair);
    MapParam p(alpha);
    auto fx = random_cone_function(100 + pair, alpha);
    const auto& g = tests[pair % tests.size()];
    auto Pf = transfer_apply(p, DensityGrid::from_function(mesh, fx));
    double lhs = integrate_against(Observable("g", g, 1.0, 10.0), Pf);
    double rhs = integrate_function(*fine, [&](double x) { return fx(x) * g(apply(p, x)); }, bp);
    double mf = integrate_function(*fine, [&](double x) { return std::abs(fx(x)); });
    EXPECT_LE(std::abs(lhs - rhs), 1e-6 * sup[pair % sup.size()] * mf) << "pair " << pair << " alpha " << alpha;
  }
}

TEST(Transfer, RefinementConsistency) {
  std::vector<std::size_t> ns = {256, 512, 1024, 2048};
  std::vector<DensityGrid> p1;
  for (std::size_t n : ns) p1.push_back(transfer_apply(MapParam(0.5), DensityGrid::constant(Mesh::make(n), 1.0)));
  std::vector<double> diff;
  for (std::size_t k = 0; k + 1 < ns.size(); ++k) {
    double d = 0.0;
    for (std::size_t i = 0; i < ns[k]; ++i) d = std::max(d, std::abs(p1[k].value(i) - p1[k + 1].value(2 * i + 1)));
    diff.push_back(d);
  }
  // each doubling changes the values less than the previous one did, and the
  // last change is within 4x of the geometric trend of the first two
  EXPECT_LT(diff[1], diff[0]);
  EXPECT_LE(diff[2], 4.0 * diff[1] * diff[1] / diff[0]);
}

TEST(Transfer, WeightedOperatorIsChangeOfMeasure) {
  auto mesh = Mesh::make(512);
  MapParam p(0.4);
  auto f = DensityGrid::from_function(mesh, [](double x) { return 1.0 + x; });
  auto w = transfer_apply_weighted(p, f, 0.4);
  // mass in m~ is preserved: int (P~ f) x^-a = int f x^-a
  EXPECT_NEAR(integrate(w, 0.4), integrate(f, 0.4), 1e-8);
}

TEST(Stationary, SingleMapIsInvariant) {
  StationaryOptions o;
  o.mesh = Mesh::make(512);
  auto st = stationary_density(ParameterSpace::single(0.3), 1e-9, o);
  EXPECT_LE(st.residual, 1e-9);
  EXPECT_NEAR(integrate(st.density), 1.0, 1e-10);
  auto again = transfer_apply(MapParam(0.3), st.density);
  EXPECT_LE(l1_norm(again - st.density), 1e-9);
}

TEST(Stationary, LowerBoundAndCone) {
  StationaryOptions o;
  o.mesh = Mesh::make(512);
  ParameterSpace space({0.2, 0.35, 0.5}, {0.3, 0.3, 0.4});
  auto h = stationary_density(space, 1e-9, o).density;
  ConeParams c(20.0, 0.5);
  EXPECT_GE(h.value(h.size() - 1), cone_lower_bound(c) * integrate(h));
  auto chk = cone_check(h, c);
  EXPECT_TRUE(chk.ok) << chk.summary();
}

TEST(Stationary, CapRaisesConvergenceError) {
  StationaryOptions o;
  o.mesh = Mesh::make(256);
  o.max_steps = 20;
  try {
    stationary_density(ParameterSpace::single(0.7), 1e-12, o);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(e.iterations(), 20u);
    EXPECT_GT(e.residual(), 1e-12);
  }
  EXPECT_THROW(stationary_density(ParameterSpace::single(0.3), 0.0, o), std::invalid_argument);
}

TEST(Decay, ConstantGivesZero) {
  auto mesh = Mesh::make(256);
  auto d = decay_curve(Schedule::constant(MapParam(0.5)), DensityGrid::constant(mesh, 3.0), 20, ConeParams(20.0, 0.5));
  for (double v : d) EXPECT_LE(v, 1e-9);
}

TEST(Decay, RejectsOutsideCone) {
  auto mesh = Mesh::make(256);
  auto f = DensityGrid::from_function(mesh, [](double x) { return x; });
  EXPECT_THROW(decay_curve(Schedule::constant(MapParam(0.5)), f, 5, ConeParams(20.0, 0.5)), std::invalid_argument);
}

TEST(Decay, RateSingleMap) {
  auto mesh = Mesh::make(512);
  auto f = DensityGrid::from_function(mesh, [](double x) { return 1.0 + std::pow(x, -0.4); }, -0.4);
  auto d = decay_curve(Schedule::constant(MapParam(0.5)), f, 500, ConeParams(20.0, 0.5));
  std::vector<double> x, y;
  for (std::size_t n = 50; n <= 500; n += 50) {
    x.push_back(static_cast<double>(n));
    y.push_back(d[n]);
  }
  for (double v : d) ASSERT_GE(v, 0.0);
  EXPECT_LE(stats::loglog_fit(x, y).slope, -0.75);
}

TEST(ConditionalExpectation, TrivialCases) {
  auto mesh = Mesh::make(256);
  auto s = Schedule::constant(MapParam(0.4));
  ConeParams c(20.0, 0.4);
  auto phi = Observable::cosine();
  auto same = conditional_expectation(s, phi, 3, 3, c, mesh);
  for (std::size_t i = 0; i < mesh->size(); i += 17) ASSERT_NEAR(same.value(i), phi(mesh->node(i)), 1e-12);
  auto ones = conditional_expectation(s, Observable::constant(1.0), 1, 4, c, mesh);
  for (double v : ones.values()) ASSERT_NEAR(v, 1.0, 1e-12);
  EXPECT_THROW(conditional_expectation(s, phi, 4, 3, c, mesh), std::invalid_argument);
}

TEST(ConditionalExpectation, MatchesMonteCarloBins) {
  auto mesh = Mesh::make(1024);
  MapParam p(0.5);
  auto s = Schedule::constant(p);
  auto phi = Observable::identity();
  auto ce = conditional_expectation(s, phi, 0, 1, ConeParams(20.0, 0.5), mesh);
  const int bins = 10;
  const std::size_t samples = 100000;
  CounterRng r(17, StreamDomain::Fixture);
  std::vector<std::vector<double>> resid(bins);
  for (std::size_t i = 0; i < samples; ++i) {
    double x = r.uniform(0, i);
    double y = apply(p, x);
    int b = std::min(bins - 1, static_cast<int>(y * bins));
    resid[b].push_back(phi(x) - ce(y));
  }
  for (int b = 0; b < bins; ++b) {
    auto m = stats::moments(resid[b]);
    EXPECT_LE(std::abs(m.mean), 3.0 * m.stderr_mean) << "bin " << b;
  }
}

TEST(ConditionalExpectation, FloorBreakdown) {
  auto mesh = Mesh::make(256);
  // a huge cone constant pushes the floor above P^k 1
  ConeParams loose(1e6, 0.9);
  ConeParams tight(1.0001, 0.9);
  auto s = Schedule::constant(MapParam(0.9));
  EXPECT_THROW(conditional_expectation(s, Observable::identity(), 0, 30, tight, mesh), GridBreakdown);
  EXPECT_NO_THROW(conditional_expectation(s, Observable::identity(), 0, 2, loose, mesh));
}

}  // namespace
}  // namespace lsv
