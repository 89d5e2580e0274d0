#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "lsv/measure.hpp"
#include "lsv/observable.hpp"
#include "lsv/schedule.hpp"

namespace lsv {

struct McOptions {
  std::uint64_t seed = 1;
  std::size_t samples = 100000;
  unsigned workers = 0;                 // 0 = all cores
  std::shared_ptr<const Mesh> mesh;     // default 4096 nodes
  double stationary_tol = 1e-9;

  std::shared_ptr<const Mesh> mesh_or_default() const;
};

struct DeviationEstimate {
  std::size_t n;
  double threshold;  // |S_n| > threshold counts as a hit
  double p_hat;
  double ci_low;
  double ci_high;
  std::size_t hits;
  std::size_t samples;
};

// P_mu(|S_n| > eps n) for every n in n_list. Initial points follow mu; with
// `centered` the sums subtract the mu-centering table along s.
std::vector<DeviationEstimate> deviation_curve(const Schedule& s, const Observable& phi,
                                               std::span<const std::size_t> n_list, double eps, const Measure& mu,
                                               bool centered, const McOptions& opts);
DeviationEstimate deviation_probability(const Schedule& s, const Observable& phi, std::size_t n, double eps,
                                        const Measure& mu, bool centered, const McOptions& opts);

// P_mu(|S_n - centering| > t n^tau), 1/2 < tau <= 1.
std::vector<DeviationEstimate> moderate_deviation(const Schedule& s, const Observable& phi,
                                                  std::span<const std::size_t> n_list, double tau, double t,
                                                  const Measure& mu, const McOptions& opts);

struct MomentEstimate {
  std::size_t n;
  double p;
  double value;  // E_mu |S_n - centering|^{2p}
  double stderr_value;
};
std::vector<MomentEstimate> moment_estimate(const Schedule& s, const Observable& phi,
                                            std::span<const std::size_t> n_list, double p, const Measure& mu,
                                            const McOptions& opts);

struct VarianceReport {
  double sigma2;
  std::size_t K;
  double mu_phi;                      // mean removed before summing correlations
  std::vector<double> partial_sums;   // sum_{k=0}^{j} mu(phi U^k phi), j = 0..K
  double stderr_estimate;             // truncation error proxy K |c_K|
  bool tail_settled;                  // last 10 increments shrink in magnitude
};

// Annealed variance -mu(phi^2) + 2 sum_{k=0}^{K} mu(phi U^k phi) with phi
// recentered under the stationary mu.
VarianceReport annealed_variance(const ParameterSpace& space, const Observable& phi, std::size_t K,
                                 const McOptions& opts);

struct QuenchedVariance {
  std::size_t n;
  double value;  // Var_m(S_n) / n with quenched centering
  double stderr_value;
};
QuenchedVariance quenched_variance(const Schedule& s, const Observable& phi, std::size_t n, const McOptions& opts);

enum class Normalization { SqrtNFixedSigma, SelfNormed };

struct CltReport {
  std::size_t n;
  std::size_t samples;
  double ks;
  double sigma2_used;
  double mc_variance;  // sample Var(S_n / sqrt n)
  double mc_variance_stderr;
};

// Annealed CLT: each sample draws its own omega, x ~ mu stationary, sums of
// the mu-recentered phi scaled by sqrt(n sigma2). sigma2 defaults to the
// annealed formula value.
CltReport annealed_clt(const ParameterSpace& space, const Observable& phi, std::size_t n, const McOptions& opts,
                       std::optional<double> sigma2 = std::nullopt, std::size_t K = 200);

// Quenched CLT along a fixed omega: x ~ Lebesgue, centered sums. SelfNormed
// divides by sigma_n(omega) from the same sample; SqrtNFixedSigma needs sigma2.
CltReport quenched_clt(const Schedule& s, const Observable& phi, std::size_t n, Normalization norm,
                       const McOptions& opts, std::optional<double> sigma2 = std::nullopt);

struct CenteringReport {
  std::vector<double> mu_beta;  // invariant mean of phi per map
  std::vector<std::size_t> n_list;
  std::vector<double> drift_mean;
  std::vector<double> drift_variance;  // across omega draws
  std::size_t draws;
};

// D_n(omega) = n^{-1/2} sum_{j=1}^n m(phi o T^j_omega), over `draws`
// independent omega.
CenteringReport centering_diagnostic(const ParameterSpace& space, const Observable& phi,
                                     std::span<const std::size_t> n_list, std::size_t draws, const McOptions& opts);

struct ProductReport {
  double sigma2;        // annealed formula
  double sigma_tilde2;  // Var(S_n(x) - S_n(y)) / n on the fibred product
  double sigma_tilde2_stderr;
  double ratio;         // sigma_tilde2 / (2 sigma2)
  double ks;
  std::size_t n;
  std::size_t samples;
};

// Two independent mu-distributed points driven by the same omega.
ProductReport product_system_test(const ParameterSpace& space, const Observable& phi, std::size_t n,
                                  const McOptions& opts, std::size_t K = 200);

// ceil(4p / (1 - alpha)) for p > max(1, 1/alpha - 1).
int quenched_ld_exponent(double p, double alpha);

}  // namespace lsv
