#include <gtest/gtest.h>

#include <cmath>

#include "lsv/martingale.hpp"
#include "lsv/montecarlo.hpp"
#include "lsv/stats.hpp"
#include "lsv/transfer.hpp"

namespace lsv {
namespace {

const ConeParams kCone(20.0, 0.5);

TEST(Centering, ConstantObservable) {
  auto mesh = Mesh::make(256);
  ParameterSpace space({0.2, 0.5}, {0.5, 0.5});
  auto t = centering_table(Schedule::bernoulli(space, 1), Observable::constant(1.0), Measure::lebesgue(), 30, mesh);
  for (double c : t.means) EXPECT_NEAR(c, 1.0, 1e-10);
  auto tt = centering_table(Schedule::bernoulli(space, 1), Observable::constant(1.0), Measure::tilde(0.5), 30, mesh);
  for (double c : tt.means) EXPECT_NEAR(c, 1.0, 1e-8);
}

TEST(Centering, ZeroMeanAtStart) {
  auto mesh = Mesh::make(256);
  auto t = centering_table(Schedule::constant(MapParam(0.3)), Observable::identity().shifted(0.5),
                           Measure::lebesgue(), 3, mesh);
  EXPECT_NEAR(t[0], 0.0, 1e-8);
}

TEST(Centering, InvariantMeasureGivesConstantMeans) {
  auto mesh = Mesh::make(512);
  MapParam beta(0.35);
  Measure mu = Measure::single_map_invariant(beta, 1e-11, mesh);
  auto t = centering_table(Schedule::constant(beta), Observable::identity(), mu, 50, mesh);
  for (std::size_t k = 1; k < t.size(); ++k) EXPECT_NEAR(t[k], t[0], 1e-8) << k;
}

TEST(BirkhoffSum, Examples) {
  auto s = Schedule::constant(MapParam(0.4));
  EXPECT_DOUBLE_EQ(birkhoff_sum(s, Observable::identity(), 0.75, 2), 1.5);
  for (std::size_t n : {1, 5, 50}) EXPECT_EQ(birkhoff_sum(s, Observable::identity(), 0.0, n), 0.0);
  auto mesh = Mesh::make(256);
  auto phi = Observable::constant(2.5);
  auto t = centering_table(s, phi, Measure::lebesgue(), 40, mesh);
  for (std::size_t n : {1, 7, 40}) EXPECT_NEAR(birkhoff_sum(s, phi, 0.3, n, &t), 0.0, 1e-8 * n);
  EXPECT_THROW(birkhoff_sum(s, phi, 0.3, 41, &t), std::invalid_argument);
}

TEST(MartingaleH, FirstIsZero) {
  auto mesh = Mesh::make(256);
  auto h1 = martingale_H(Schedule::constant(MapParam(0.3)), Observable::identity(), 1, Measure::lebesgue(), mesh,
                         kCone);
  for (double v : h1.values()) EXPECT_EQ(v, 0.0);
}

TEST(MartingaleH, ConstantObservableVanishes) {
  auto mesh = Mesh::make(256);
  ParameterSpace space({0.2, 0.5}, {0.5, 0.5});
  MartingaleSequence ms(Schedule::bernoulli(space, 2), Observable::constant(3.0), Measure::lebesgue(), 10, mesh,
                        kCone);
  for (std::size_t k = 1; k <= 11; ++k) {
    for (double v : ms.H(k).values()) ASSERT_NEAR(v, 0.0, 1e-9);
  }
  for (std::size_t k = 1; k <= 10; ++k) {
    for (double x : {0.01, 0.4, 0.9}) ASSERT_NEAR(ms.psi(k, x), 0.0, 1e-9);
  }
}

TEST(MartingaleH, RecursionMatchesClosedSum) {
  auto mesh = Mesh::make(512);
  ParameterSpace space({0.2, 0.35, 0.5}, {0.3, 0.3, 0.4});
  std::vector<Schedule> schedules = {Schedule::constant(MapParam(0.45)),
                                     Schedule::fixed_list({MapParam(0.1), MapParam(0.5), MapParam(0.3),
                                                           MapParam(0.2), MapParam(0.4), MapParam(0.5)}),
                                     Schedule::bernoulli(space, 6)};
  for (const auto& s : schedules) {
    for (const auto& mu : {Measure::lebesgue(), Measure::tilde(0.5)}) {
      for (std::size_t n = 1; n <= 5; ++n) {
        auto rec = martingale_H(s, Observable::cosine(), n, mu, mesh, kCone);
        auto lit = martingale_H_closed(s, Observable::cosine(), n, mu, mesh);
        for (std::size_t i = 0; i < mesh->size(); ++i) {
          ASSERT_NEAR(rec.value(i), lit.value(i), 1e-10) << s.describe() << " " << mu.name() << " n=" << n;
        }
      }
    }
  }
}

TEST(MartingaleH, RecursionMatchesThreeTermSum) {
  // H_3 P^3 1 = P_3 P_2 (phi_1 P^1 1) + P_3 (phi_2 P^2 1), written out by hand
  auto mesh = Mesh::make(512);
  auto s = Schedule::fixed_list({MapParam(0.2), MapParam(0.4), MapParam(0.3), MapParam(0.3)});
  auto phi = Observable::identity();
  auto mu = Measure::lebesgue();
  auto table = centering_table(s, phi, mu, 3, mesh);
  auto one = DensityGrid::constant(mesh, 1.0);
  auto w1 = transfer_apply(MapParam(0.2), one);
  auto w2 = transfer_apply(MapParam(0.4), w1);
  auto w3 = transfer_apply(MapParam(0.3), w2);
  auto t1 = transfer_apply(MapParam(0.3), transfer_apply_function(MapParam(0.4), mesh, [&](double y) {
                             return (phi(y) - table[1]) * w1(y);
                           }));
  auto t2 = transfer_apply_function(MapParam(0.3), mesh, [&](double y) { return (phi(y) - table[2]) * w2(y); });
  auto h3 = (t1 + t2) / w3;
  auto rec = martingale_H(s, phi, 3, mu, mesh, kCone);
  for (std::size_t i = 0; i < mesh->size(); ++i) ASSERT_NEAR(rec.value(i), h3.value(i), 1e-10);
}

TEST(Martingale, DecompositionIdentityAlongOrbits) {
  auto mesh = Mesh::make(512);
  ParameterSpace space({0.2, 0.35, 0.5}, {0.3, 0.3, 0.4});
  std::vector<Schedule> schedules = {Schedule::constant(MapParam(0.5)), materialize(Schedule::bernoulli(space, 9), 30),
                                     Schedule::bernoulli(space, 10)};
  CounterRng r(21, StreamDomain::Fixture);
  for (const auto& s : schedules) {
    MartingaleSequence ms(s, Observable::identity(), Measure::lebesgue(), 20, mesh, kCone);
    for (std::uint64_t i = 0; i < 100; ++i) ASSERT_LE(ms.decomposition_error(r.uniform(0, i), 20), 1e-6);
  }
}

TEST(Martingale, ReverseMartingaleResidual) {
  auto mesh = Mesh::make(1024);
  ParameterSpace space({0.2, 0.35, 0.5}, {0.3, 0.3, 0.4});
  MartingaleSequence ms(Schedule::bernoulli(space, 12), Observable::identity(), Measure::lebesgue(), 12, mesh, kCone);
  for (const auto& g : {Observable::constant(1.0), Observable::identity(), Observable::polynomial({0, 0, 1})}) {
    for (std::size_t k = 1; k <= 12; ++k) {
      EXPECT_LE(ms.reverse_martingale_residual(k, g), 1e-5 * g.sup_norm()) << g.name() << " k=" << k;
    }
  }
}

TEST(Martingale, TildeVariantDecomposes) {
  auto mesh = Mesh::make(512);
  MartingaleSequence ms(Schedule::constant(MapParam(0.4)), Observable::cosine(), Measure::tilde(0.4), 15, mesh,
                        ConeParams(20.0, 0.4));
  EXPECT_LE(ms.decomposition_error(0.21, 15), 1e-6);
  EXPECT_LE(ms.reverse_martingale_residual(5, Observable::identity()), 1e-5);
}

TEST(Martingale, HGrowthBound) {
  auto mesh = Mesh::make(1024);
  const double alpha = 0.6, p = 2.0;
  MartingaleSequence ms(Schedule::constant(MapParam(alpha)), Observable::identity(), Measure::lebesgue(), 200, mesh,
                        ConeParams(20.0, alpha));
  std::vector<double> x, y;
  for (std::size_t n = 20; n <= 200; n += 20) {
    x.push_back(static_cast<double>(n));
    y.push_back(ms.h_norm(n, p));
  }
  double bound = 1.0 + (1.0 / p) * (1.0 - 1.0 / alpha) + 0.15;
  EXPECT_LE(stats::loglog_fit(x, y).slope, bound);
}

TEST(Martingale, CenteredSumsHaveZeroMean) {
  auto mesh = Mesh::make(1024);
  ParameterSpace space({0.2, 0.5}, {0.5, 0.5});
  auto s = Schedule::bernoulli(space, 14);
  auto phi = Observable::identity();
  Measure mu = Measure::lebesgue();
  const std::size_t n = 200;
  auto table = centering_table(s, phi, mu, n, mesh);
  SumSpec spec;
  spec.phi = &phi;
  spec.quenched = &s;
  spec.initial = &mu;
  spec.seed = 3;
  spec.centering = table.means;
  spec.checkpoints = {n};
  spec.samples = 100000;
  auto sums = birkhoff_sums(spec);
  auto m = stats::moments(sums.row(0));
  EXPECT_LE(std::abs(m.mean), 4.0 * m.stderr_mean + n * 1e-8);
}

TEST(Martingale, IndexGuards) {
  auto mesh = Mesh::make(256);
  MartingaleSequence ms(Schedule::constant(MapParam(0.3)), Observable::identity(), Measure::lebesgue(), 5, mesh,
                        ConeParams(20.0, 0.3));
  EXPECT_THROW(ms.H(0), std::out_of_range);
  EXPECT_THROW(ms.H(7), std::out_of_range);
  EXPECT_THROW(ms.psi(6, 0.1), std::out_of_range);
  EXPECT_THROW(MartingaleSequence(Schedule::constant(MapParam(0.3)), Observable::identity(), Measure::lebesgue(), 0,
                                  mesh, ConeParams(20.0, 0.3)),
               std::invalid_argument);
}

}  // namespace
}  // namespace lsv
