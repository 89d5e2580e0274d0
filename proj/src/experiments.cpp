#include "lsv/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lsv/errors.hpp"
#include "lsv/format.hpp"
#include "lsv/martingale.hpp"
#include "lsv/montecarlo.hpp"
#include "lsv/parallel.hpp"
#include "lsv/stats.hpp"
#include "lsv/transfer.hpp"

namespace lsv {

std::shared_ptr<const Mesh> McOptions::mesh_or_default() const { return mesh ? mesh : Mesh::make(4096); }

namespace {

std::vector<std::size_t> sorted_checkpoints(std::span<const std::size_t> n_list) {
  if (n_list.empty()) throw std::invalid_argument("n_list is empty");
  std::vector<std::size_t> cps(n_list.begin(), n_list.end());
  std::sort(cps.begin(), cps.end());
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
  if (cps.front() == 0) throw std::invalid_argument("n must be positive");
  return cps;
}

std::size_t row_of(const std::vector<std::size_t>& cps, std::size_t n) {
  return static_cast<std::size_t>(std::lower_bound(cps.begin(), cps.end(), n) - cps.begin());
}

// Sums along a fixed omega from mu, optionally centered by the mu-table.
SumMatrix quenched_sums(const Schedule& s, const Observable& phi, const std::vector<std::size_t>& cps,
                        const Measure& mu, bool centered, const McOptions& opts, CenteringTable* table_out = nullptr) {
  CenteringTable table;
  if (centered) table = centering_table(s, phi, mu, cps.back(), opts.mesh_or_default());
  SumSpec spec;
  spec.phi = &phi;
  spec.quenched = &s;
  spec.initial = &mu;
  spec.seed = opts.seed;
  spec.centering = table.means;
  spec.checkpoints = cps;
  spec.samples = opts.samples;
  spec.workers = opts.workers;
  SumMatrix m = birkhoff_sums(spec);
  if (table_out) *table_out = std::move(table);
  return m;
}

DeviationEstimate count_hits(std::span<const double> sums, std::size_t n, double threshold) {
  std::size_t hits = 0;
  for (double v : sums) hits += std::abs(v) > threshold ? 1 : 0;
  auto ci = stats::wilson_interval(hits, sums.size());
  return {n, threshold, static_cast<double>(hits) / static_cast<double>(sums.size()), ci.low, ci.high, hits,
          sums.size()};
}

struct MeanSquare {
  double value;
  double stderr_value;
};

MeanSquare mean_square_with_error(std::span<const double> v) {
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) sq[i] = v[i] * v[i];
  auto m = stats::moments(sq);
  return {m.mean, m.stderr_mean};
}

VarianceReport variance_from_density(const ParameterSpace& space, const Observable& phi, const DensityGrid& h,
                                     std::size_t K) {
  const auto& mesh = h.mesh_ptr();
  const double mu_phi = integrate_against(phi, h);
  const Observable centered = phi.shifted(mu_phi);
  const auto& bps = centered.breakpoints();

  VarianceReport r;
  r.K = K;
  r.mu_phi = mu_phi;
  r.partial_sums.resize(K + 1);
  std::vector<double> c(K + 1);
  c[0] = integrate_function(
      *mesh, [&](double x) { double v = centered(x); return v * v * h(x); }, bps);
  if (K >= 1) {
    // first application on the exact product: phi may jump at 1/2
    std::vector<double> acc(mesh->size(), 0.0);
    for (std::size_t j = 0; j < space.size(); ++j) {
      DensityGrid g = transfer_apply_function(
          space.omega(j), mesh, [&](double y) { return centered(y) * h(y); }, h.tail());
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += space.prob(j) * g.value(i);
    }
    DensityGrid g(mesh, std::move(acc), h.tail());
    for (std::size_t k = 1; k <= K; ++k) {
      if (k > 1) g = annealed_apply(space, g);
      c[k] = integrate_against(centered, g);
    }
  }
  double run = 0.0;
  for (std::size_t k = 0; k <= K; ++k) {
    run += c[k];
    r.partial_sums[k] = run;
  }
  r.sigma2 = -c[0] + 2.0 * r.partial_sums[K];
  r.stderr_estimate = static_cast<double>(K) * std::abs(c[K]);
  // settled when the last 10 increments sit below the one before them
  r.tail_settled = K >= 10;
  for (std::size_t k = K >= 10 ? K - 9 : 0; r.tail_settled && k <= K; ++k) {
    r.tail_settled = std::abs(c[k]) <= std::abs(c[K - 10]) || std::abs(c[k]) < 1e-14;
  }
  return r;
}

void require_positive_sigma(double sigma2, const char* what) {
  if (!(sigma2 > 1e-10)) {
    throw DegenerateVariance(std::string(what) + ": variance " + format_double(sigma2) + " is degenerate", sigma2);
  }
}

std::vector<double> normalized(std::span<const double> v, double scale) {
  std::vector<double> z(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) z[i] = v[i] / scale;
  return z;
}

}  // namespace

std::vector<DeviationEstimate> deviation_curve(const Schedule& s, const Observable& phi,
                                               std::span<const std::size_t> n_list, double eps, const Measure& mu,
                                               bool centered, const McOptions& opts) {
  if (!(eps > 0.0)) throw std::invalid_argument("deviation: eps must be positive");
  if (opts.samples < 1000) throw std::invalid_argument("deviation: need at least 1000 samples");
  auto cps = sorted_checkpoints(n_list);
  SumMatrix sums = quenched_sums(s, phi, cps, mu, centered, opts);
  std::vector<DeviationEstimate> out;
  for (std::size_t n : n_list) out.push_back(count_hits(sums.row(row_of(cps, n)), n, eps * static_cast<double>(n)));
  return out;
}

DeviationEstimate deviation_probability(const Schedule& s, const Observable& phi, std::size_t n, double eps,
                                        const Measure& mu, bool centered, const McOptions& opts) {
  std::size_t ns[1] = {n};
  return deviation_curve(s, phi, ns, eps, mu, centered, opts).front();
}

std::vector<DeviationEstimate> moderate_deviation(const Schedule& s, const Observable& phi,
                                                  std::span<const std::size_t> n_list, double tau, double t,
                                                  const Measure& mu, const McOptions& opts) {
  if (!(tau > 0.5 && tau <= 1.0)) throw std::invalid_argument("moderate_deviation: tau must lie in (1/2, 1]");
  if (!(t > 0.0)) throw std::invalid_argument("moderate_deviation: t must be positive");
  if (opts.samples < 1000) throw std::invalid_argument("moderate_deviation: need at least 1000 samples");
  auto cps = sorted_checkpoints(n_list);
  SumMatrix sums = quenched_sums(s, phi, cps, mu, true, opts);
  std::vector<DeviationEstimate> out;
  for (std::size_t n : n_list) {
    out.push_back(count_hits(sums.row(row_of(cps, n)), n, t * std::pow(static_cast<double>(n), tau)));
  }
  return out;
}

std::vector<MomentEstimate> moment_estimate(const Schedule& s, const Observable& phi,
                                            std::span<const std::size_t> n_list, double p, const Measure& mu,
                                            const McOptions& opts) {
  if (!(p >= 1.0)) throw std::invalid_argument("moment_estimate: p must be at least 1");
  auto cps = sorted_checkpoints(n_list);
  SumMatrix sums = quenched_sums(s, phi, cps, mu, true, opts);
  std::vector<MomentEstimate> out;
  for (std::size_t n : n_list) {
    auto row = sums.row(row_of(cps, n));
    std::vector<double> pw(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) pw[i] = std::pow(std::abs(row[i]), 2.0 * p);
    auto m = stats::moments(pw);
    out.push_back({n, p, m.mean, m.stderr_mean});
  }
  return out;
}

VarianceReport annealed_variance(const ParameterSpace& space, const Observable& phi, std::size_t K,
                                 const McOptions& opts) {
  StationaryOptions so;
  so.mesh = opts.mesh_or_default();
  auto h = stationary_density(space, opts.stationary_tol, so).density;
  return variance_from_density(space, phi, h, K);
}

QuenchedVariance quenched_variance(const Schedule& s, const Observable& phi, std::size_t n, const McOptions& opts) {
  if (n == 0) throw std::invalid_argument("quenched_variance: n must be positive");
  std::vector<std::size_t> cps{n};
  SumMatrix sums = quenched_sums(s, phi, cps, Measure::lebesgue(), true, opts);
  auto ms = mean_square_with_error(sums.row(0));
  const double nd = static_cast<double>(n);
  return {n, ms.value / nd, ms.stderr_value / nd};
}

CltReport annealed_clt(const ParameterSpace& space, const Observable& phi, std::size_t n, const McOptions& opts,
                       std::optional<double> sigma2, std::size_t K) {
  if (n == 0) throw std::invalid_argument("annealed_clt: n must be positive");
  Measure mu = Measure::stationary(space, opts.stationary_tol, opts.mesh_or_default());
  const double mu_phi = integrate_against(phi, *mu.density());
  const Observable centered = phi.shifted(mu_phi);
  const double s2 = sigma2 ? *sigma2 : variance_from_density(space, phi, *mu.density(), K).sigma2;
  require_positive_sigma(s2, "annealed_clt");

  SumSpec spec;
  spec.phi = &centered;
  spec.annealed = &space;
  spec.omega_seed = opts.seed;
  spec.initial = &mu;
  spec.seed = opts.seed;
  spec.checkpoints = {n};
  spec.samples = opts.samples;
  spec.workers = opts.workers;
  SumMatrix sums = birkhoff_sums(spec);
  const double nd = static_cast<double>(n);
  auto scaled = normalized(sums.row(0), std::sqrt(nd));
  auto m = stats::moments(scaled);
  CltReport r;
  r.n = n;
  r.samples = opts.samples;
  r.sigma2_used = s2;
  r.mc_variance = m.variance;
  // Var of a sample variance ~ (m4 - s^4)/N; close enough via squares
  r.mc_variance_stderr = mean_square_with_error(scaled).stderr_value;
  r.ks = stats::ks_distance_normal(normalized(scaled, std::sqrt(s2)));
  return r;
}

CltReport quenched_clt(const Schedule& s, const Observable& phi, std::size_t n, Normalization norm,
                       const McOptions& opts, std::optional<double> sigma2) {
  if (n == 0) throw std::invalid_argument("quenched_clt: n must be positive");
  if (norm == Normalization::SqrtNFixedSigma && !sigma2) {
    throw std::invalid_argument("quenched_clt: fixed-sigma normalization needs sigma2");
  }
  std::vector<std::size_t> cps{n};
  SumMatrix sums = quenched_sums(s, phi, cps, Measure::lebesgue(), true, opts);
  const double nd = static_cast<double>(n);
  auto scaled = normalized(sums.row(0), std::sqrt(nd));
  auto ms = mean_square_with_error(scaled);
  const double s2 = norm == Normalization::SelfNormed ? ms.value : *sigma2;
  require_positive_sigma(s2, "quenched_clt");
  CltReport r;
  r.n = n;
  r.samples = opts.samples;
  r.sigma2_used = s2;
  r.mc_variance = ms.value;
  r.mc_variance_stderr = ms.stderr_value;
  r.ks = stats::ks_distance_normal(normalized(scaled, std::sqrt(s2)));
  return r;
}

CenteringReport centering_diagnostic(const ParameterSpace& space, const Observable& phi,
                                     std::span<const std::size_t> n_list, std::size_t draws, const McOptions& opts) {
  if (space.size() < 2) throw std::invalid_argument("centering_diagnostic: need at least two maps");
  if (draws < 2) throw std::invalid_argument("centering_diagnostic: need at least two omega draws");
  auto mesh = opts.mesh_or_default();
  auto cps = sorted_checkpoints(n_list);

  CenteringReport r;
  r.n_list = cps;
  r.draws = draws;
  for (std::size_t j = 0; j < space.size(); ++j) {
    r.mu_beta.push_back(Measure::single_map_invariant(space.omega(j), opts.stationary_tol, mesh).mean(phi, mesh));
  }

  std::vector<double> drift(cps.size() * draws);
  parallel_for(draws, opts.workers, [&](std::size_t d) {
    Schedule omega = Schedule::bernoulli(space, opts.seed, d);
    CenteringTable t = centering_table(omega, phi, Measure::lebesgue(), cps.back(), mesh);
    double run = 0.0;
    std::size_t c = 0;
    for (std::size_t k = 1; k <= cps.back(); ++k) {
      run += t.means[k];
      if (k == cps[c]) drift[c++ * draws + d] = run / std::sqrt(static_cast<double>(k));
    }
  });
  for (std::size_t c = 0; c < cps.size(); ++c) {
    auto m = stats::moments(std::span<const double>(drift.data() + c * draws, draws));
    r.drift_mean.push_back(m.mean);
    r.drift_variance.push_back(m.variance);
  }
  return r;
}

ProductReport product_system_test(const ParameterSpace& space, const Observable& phi, std::size_t n,
                                  const McOptions& opts, std::size_t K) {
  if (n == 0) throw std::invalid_argument("product_system_test: n must be positive");
  Measure mu = Measure::stationary(space, opts.stationary_tol, opts.mesh_or_default());
  const double mu_phi = integrate_against(phi, *mu.density());
  const Observable centered = phi.shifted(mu_phi);

  ProductReport r;
  r.n = n;
  r.samples = opts.samples;
  r.sigma2 = variance_from_density(space, phi, *mu.density(), K).sigma2;

  SumSpec spec;
  spec.phi = &centered;
  spec.annealed = &space;
  spec.omega_seed = opts.seed;
  spec.initial = &mu;
  spec.seed = opts.seed;
  spec.checkpoints = {n};
  spec.samples = opts.samples;
  spec.workers = opts.workers;
  SumMatrix sx = birkhoff_sums(spec);
  spec.x0_domain = StreamDomain::InitialPointAux;
  SumMatrix sy = birkhoff_sums(spec);

  const double nd = static_cast<double>(n);
  std::vector<double> diff(opts.samples);
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = (sx.row(0)[i] - sy.row(0)[i]) / std::sqrt(nd);
  auto ms = mean_square_with_error(diff);
  r.sigma_tilde2 = ms.value;
  r.sigma_tilde2_stderr = ms.stderr_value;
  require_positive_sigma(r.sigma_tilde2, "product_system_test");
  r.ratio = r.sigma_tilde2 / (2.0 * r.sigma2);
  r.ks = stats::ks_distance_normal(normalized(diff, std::sqrt(r.sigma_tilde2)));
  return r;
}

int quenched_ld_exponent(double p, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("quenched_ld_exponent: alpha must lie in (0,1)");
  if (!(p > std::max(1.0, 1.0 / alpha - 1.0))) {
    throw std::invalid_argument("quenched_ld_exponent: need p > max(1, 1/alpha - 1)");
  }
  double v = 4.0 * p / (1.0 - alpha);
  // guard against 1 - alpha rounding pushing an exact integer over
  return static_cast<int>(std::ceil(v * (1.0 - 8.0 * std::numeric_limits<double>::epsilon())));
}

}  // namespace lsv
