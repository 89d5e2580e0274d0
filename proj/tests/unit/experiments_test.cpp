#include <gtest/gtest.h>

#include <cmath>

#include "lsv/errors.hpp"
#include "lsv/experiments.hpp"
#include "lsv/martingale.hpp"
#include "lsv/stats.hpp"
#include "lsv/transfer.hpp"

namespace lsv {
namespace {

McOptions small_opts(std::size_t samples = 20000, std::uint64_t seed = 1) {
  McOptions o;
  o.seed = seed;
  o.samples = samples;
  o.workers = 2;
  o.mesh = Mesh::make(1024);
  return o;
}

TEST(Deviation, EpsAboveTwiceSupGivesZero) {
  auto s = Schedule::constant(MapParam(0.5));
  std::vector<std::size_t> ns = {10, 100};
  auto est = deviation_curve(s, Observable::identity(), ns, 2.01, Measure::lebesgue(), true, small_opts(5000));
  for (const auto& e : est) {
    EXPECT_EQ(e.p_hat, 0.0);
    EXPECT_EQ(e.hits, 0u);
    EXPECT_EQ(e.ci_low, 0.0);
    EXPECT_GT(e.ci_high, 0.0);
  }
}

TEST(Deviation, ZeroObservable) {
  auto s = Schedule::constant(MapParam(0.3));
  auto e = deviation_probability(s, Observable::constant(0.0), 50, 1e-6, Measure::tilde(0.3), false, small_opts(2000));
  EXPECT_EQ(e.p_hat, 0.0);
}

TEST(Deviation, EstimateInvariants) {
  ParameterSpace space({0.2, 0.5}, {0.5, 0.5});
  auto s = Schedule::bernoulli(space, 4);
  std::vector<std::size_t> ns = {64, 16, 256};
  auto est = deviation_curve(s, Observable::identity(), ns, 0.05, Measure::lebesgue(), true, small_opts());
  ASSERT_EQ(est.size(), 3u);
  EXPECT_EQ(est[1].n, 16u);
  for (const auto& e : est) {
    EXPECT_EQ(e.p_hat, static_cast<double>(e.hits) / static_cast<double>(e.samples));
    EXPECT_LE(e.ci_low, e.p_hat);
    EXPECT_GE(e.ci_high, e.p_hat);
    EXPECT_EQ(e.threshold, 0.05 * e.n);
  }
  EXPECT_THROW(deviation_curve(s, Observable::identity(), ns, 0.0, Measure::lebesgue(), true, small_opts()),
               std::invalid_argument);
  EXPECT_THROW(deviation_curve(s, Observable::identity(), ns, 0.1, Measure::lebesgue(), true, small_opts(999)),
               std::invalid_argument);
}

TEST(Deviation, WorkerCountIndependent) {
  ParameterSpace space({0.2, 0.5}, {0.5, 0.5});
  auto s = Schedule::bernoulli(space, 4);
  std::vector<std::size_t> ns = {100, 300};
  auto o1 = small_opts(5000, 9), o4 = small_opts(5000, 9);
  o1.workers = 1;
  o4.workers = 4;
  auto a = deviation_curve(s, Observable::cosine(), ns, 0.02, Measure::tilde(0.5), true, o1);
  auto b = deviation_curve(s, Observable::cosine(), ns, 0.02, Measure::tilde(0.5), true, o4);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].hits, b[i].hits);
  auto m1 = moment_estimate(s, Observable::cosine(), ns, 1.5, Measure::lebesgue(), o1);
  auto m4 = moment_estimate(s, Observable::cosine(), ns, 1.5, Measure::lebesgue(), o4);
  for (std::size_t i = 0; i < m1.size(); ++i) EXPECT_EQ(m1[i].value, m4[i].value);
}

TEST(ModerateDeviation, TauOneIsLargeDeviation) {
  auto s = Schedule::constant(MapParam(0.6));
  std::vector<std::size_t> ns = {50, 200};
  auto md = moderate_deviation(s, Observable::identity(), ns, 1.0, 0.1, Measure::lebesgue(), small_opts(5000));
  auto ld = deviation_curve(s, Observable::identity(), ns, 0.1, Measure::lebesgue(), true, small_opts(5000));
  for (std::size_t i = 0; i < ns.size(); ++i) EXPECT_EQ(md[i].hits, ld[i].hits);
  auto zero = moderate_deviation(s, Observable::constant(0.0), ns, 0.75, 0.5, Measure::lebesgue(), small_opts(2000));
  for (const auto& e : zero) EXPECT_EQ(e.p_hat, 0.0);
  EXPECT_THROW(moderate_deviation(s, Observable::identity(), ns, 0.5, 0.5, Measure::lebesgue(), small_opts(2000)),
               std::invalid_argument);
}

TEST(Moment, TrivialAndGrowth) {
  auto s = Schedule::constant(MapParam(0.5));
  std::vector<std::size_t> ns = {64, 128, 256, 512, 1024};
  for (const auto& m : moment_estimate(s, Observable::constant(0.0), ns, 2.0, Measure::lebesgue(), small_opts(2000))) {
    EXPECT_EQ(m.value, 0.0);
  }
  for (const auto& m : moment_estimate(s, Observable::constant(0.7), ns, 1.0, Measure::lebesgue(), small_opts(2000))) {
    EXPECT_NEAR(m.value, 0.0, 1e-20);
  }
  auto est = moment_estimate(s, Observable::identity(), ns, 2.0, Measure::lebesgue(), small_opts(20000));
  std::vector<double> x, y;
  for (const auto& m : est) {
    x.push_back(static_cast<double>(m.n));
    y.push_back(m.value);
  }
  EXPECT_LE(stats::loglog_fit(x, y).slope, 2.0 * 2.0 + (1.0 - 1.0 / 0.5) + 0.3);
  EXPECT_THROW(moment_estimate(s, Observable::identity(), ns, 0.5, Measure::lebesgue(), small_opts(2000)),
               std::invalid_argument);
}

TEST(AnnealedVariance, ZeroObservable) {
  auto r = annealed_variance(ParameterSpace({0.2, 0.3}, {0.5, 0.5}), Observable::constant(0.0), 50, small_opts());
  EXPECT_EQ(r.sigma2, 0.0);
}

TEST(AnnealedVariance, FormulaBookkeeping) {
  auto r = annealed_variance(ParameterSpace({0.2, 0.3}, {0.5, 0.5}), Observable::identity(), 60, small_opts());
  ASSERT_EQ(r.partial_sums.size(), 61u);
  EXPECT_EQ(r.K, 60u);
  EXPECT_EQ(r.sigma2, -r.partial_sums[0] + 2.0 * r.partial_sums.back());
  EXPECT_GT(r.sigma2, 0.0);
  EXPECT_TRUE(r.tail_settled);
  EXPECT_FALSE(annealed_variance(ParameterSpace({0.2, 0.3}, {0.5, 0.5}), Observable::identity(), 5, small_opts())
                   .tail_settled);
}

TEST(AnnealedVariance, CoboundaryIsDegenerate) {
  MapParam beta(0.3);
  auto phi = Observable::coboundary(Observable::identity(), beta);
  auto r = annealed_variance(ParameterSpace::single(0.3), phi, 200, small_opts());
  EXPECT_LE(std::abs(r.sigma2), 1e-3);
}

// Formula sigma^2 against Var(S_n / sqrt n) from stationary starts.
TEST(AnnealedVariance, MatchesMonteCarloOnThreeFixtures) {
  struct Fixture {
    ParameterSpace space;
    Observable phi;
  };
  std::vector<Fixture> fixtures = {
      {ParameterSpace({0.2, 0.25}, {0.5, 0.5}), Observable::identity()},
      {ParameterSpace({0.1, 0.3}, {0.3, 0.7}), Observable::cosine()},
      {ParameterSpace::single(0.15), Observable::smoothed_indicator(0.2, 0.6, 0.05)},
  };
  for (const auto& f : fixtures) {
    auto o = small_opts(8000, 5);
    auto rep = annealed_clt(f.space, f.phi, 4000, o, std::nullopt, 200);
    EXPECT_NEAR(rep.mc_variance / rep.sigma2_used, 1.0, 0.10) << f.space.describe() << " " << f.phi.name();
  }
}

TEST(QuenchedVariance, ConstantObservable) {
  auto s = Schedule::constant(MapParam(0.3));
  auto q = quenched_variance(s, Observable::constant(4.0), 100, small_opts(2000));
  EXPECT_NEAR(q.value, 0.0, 1e-20);
}

TEST(QuenchedVariance, OneStepMatchesQuadrature) {
  MapParam b(0.4);
  auto s = Schedule::constant(b);
  auto phi = Observable::cosine();
  auto mesh = Mesh::make(1024);
  auto p1 = transfer_apply(b, DensityGrid::constant(mesh, 1.0));
  double mean = integrate_against(phi, p1);
  double second = integrate_against(Observable("cos^2", [&](double x) { return phi(x) * phi(x); }, 1.0, 2.0 * M_PI),
                                    p1);
  auto q = quenched_variance(s, phi, 1, small_opts(100000));
  EXPECT_NEAR(q.value, second - mean * mean, 3.0 * q.stderr_value);
}

TEST(Clt, DegenerateObservableRejected) {
  auto s = Schedule::constant(MapParam(0.2));
  EXPECT_THROW(quenched_clt(s, Observable::constant(0.0), 100, Normalization::SelfNormed, small_opts(2000)),
               DegenerateVariance);
  EXPECT_THROW(annealed_clt(ParameterSpace::single(0.2), Observable::constant(0.0), 100, small_opts(2000)),
               DegenerateVariance);
  EXPECT_THROW(quenched_clt(s, Observable::identity(), 100, Normalization::SqrtNFixedSigma, small_opts(2000)),
               std::invalid_argument);
}

TEST(Clt, QuenchedSelfNormedIsUnitVariance) {
  ParameterSpace space({0.2, 0.25}, {0.5, 0.5});
  auto r = quenched_clt(Schedule::bernoulli(space, 3), Observable::identity(), 2000, Normalization::SelfNormed,
                        small_opts(10000));
  EXPECT_LE(r.ks, 0.05);
  EXPECT_GE(r.ks, 0.0);
  EXPECT_EQ(r.sigma2_used, r.mc_variance);
}

TEST(Centering, DegenerateSpace) {
  ParameterSpace twin({0.3, 0.3}, {0.5, 0.5}, std::nullopt, ParameterSpace::Duplicates::Allow);
  std::vector<std::size_t> ns = {100, 400};
  auto o = small_opts();
  o.mesh = Mesh::make(512);
  auto r = centering_diagnostic(twin, Observable::identity(), ns, 8, o);
  EXPECT_EQ(r.mu_beta[0], r.mu_beta[1]);
  for (double v : r.drift_variance) EXPECT_LE(v, 1e-20);
}

TEST(Centering, ConstantObservableHasNoSpread) {
  ParameterSpace space({0.15, 0.35}, {0.5, 0.5});
  std::vector<std::size_t> ns = {100, 400};
  auto o = small_opts();
  o.mesh = Mesh::make(512);
  auto r = centering_diagnostic(space, Observable::constant(2.0), ns, 8, o);
  for (std::size_t i = 0; i < ns.size(); ++i) {
    EXPECT_NEAR(r.drift_mean[i], 2.0 * std::sqrt(static_cast<double>(ns[i])), 1e-9);
    EXPECT_LE(r.drift_variance[i], 1e-20);
  }
}

TEST(Centering, ConclusionsInvariantUnderScaling) {
  ParameterSpace space({0.15, 0.35}, {0.5, 0.5});
  std::vector<std::size_t> ns = {250, 1000};
  auto o = small_opts();
  o.mesh = Mesh::make(512);
  auto a = centering_diagnostic(space, Observable::identity(), ns, 16, o);
  auto b = centering_diagnostic(space, Observable::identity().scaled(7.0), ns, 16, o);
  EXPECT_NEAR(a.drift_variance[1] / a.drift_variance[0], b.drift_variance[1] / b.drift_variance[0], 1e-6);
  EXPECT_EQ(a.mu_beta[0] > a.mu_beta[1], b.mu_beta[0] > b.mu_beta[1]);
}

TEST(Product, ConstantObservableDegenerate) {
  EXPECT_THROW(product_system_test(ParameterSpace::single(0.2), Observable::constant(1.0), 100, small_opts(2000)),
               DegenerateVariance);
}

TEST(QuenchedLdExponent, Examples) {
  EXPECT_EQ(quenched_ld_exponent(2.0, 0.5), 16);
  EXPECT_EQ(quenched_ld_exponent(1.25, 0.6), 13);
  EXPECT_THROW(quenched_ld_exponent(1.0, 0.4), std::invalid_argument);
  EXPECT_THROW(quenched_ld_exponent(1.4, 0.4), std::invalid_argument);
}

}  // namespace
}  // namespace lsv
