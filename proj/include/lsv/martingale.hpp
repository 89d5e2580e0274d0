#pragma once

#include <memory>
#include <vector>

#include "lsv/cone.hpp"
#include "lsv/grid.hpp"
#include "lsv/measure.hpp"
#include "lsv/observable.hpp"
#include "lsv/schedule.hpp"

namespace lsv {

// c_k = mu(phi o T^k_omega), k = 0..n.
struct CenteringTable {
  std::vector<double> means;
  double operator[](std::size_t k) const { return means.at(k); }
  std::size_t size() const noexcept { return means.size(); }
};

CenteringTable centering_table(const Schedule& s, const Observable& phi, const Measure& mu, std::size_t n,
                               const std::shared_ptr<const Mesh>& mesh);

// sum_{k=1}^n phi(T^k x0) - c_k ; no centering when table is null.
double birkhoff_sum(const Schedule& s, const Observable& phi, double x0, std::size_t n,
                    const CenteringTable* table = nullptr);

// Reverse-martingale decomposition of the centered sums:
//   H_1 = 0,  H_{k+1} P^{k+1} w = P_{k+1}((phi_k + H_k) P^k w),
//   psi_k = phi_k + H_k - H_{k+1} o T_{k+1},
// with phi_k = phi - c_k and w the density of mu. Numerators are kept as
// grids so the recursion and the closed sum agree to rounding.
class MartingaleSequence {
 public:
  MartingaleSequence(const Schedule& s, const Observable& phi, const Measure& mu, std::size_t n_max,
                     const std::shared_ptr<const Mesh>& mesh, const ConeParams& cone);

  std::size_t n_max() const noexcept { return n_max_; }
  const DensityGrid& H(std::size_t k) const;       // k = 1..n_max+1
  const DensityGrid& weight(std::size_t k) const;  // P^k w, k = 0..n_max+1
  double centering(std::size_t k) const { return table_[k]; }
  const CenteringTable& table() const noexcept { return table_; }
  const Schedule& schedule() const noexcept { return schedule_; }
  const Observable& observable() const noexcept { return phi_; }

  double psi(std::size_t k, double x) const;  // k = 1..n_max
  DensityGrid psi_grid(std::size_t k) const;  // sampled at the nodes (jumps at 1/2)

  // |E_mu[psi_k o T^k  g o T^{k+1}]|
  double reverse_martingale_residual(std::size_t k, const Observable& g) const;
  // ||H_k o T^k||_{L^p(mu)}
  double h_norm(std::size_t k, double p) const;
  // |S_n(x0) - sum_k psi_k(T^k x0) - H_{n+1}(T^{n+1} x0)|, centered sums
  double decomposition_error(double x0, std::size_t n) const;

 private:
  Schedule schedule_;
  Observable phi_;
  std::size_t n_max_;
  double mass_;
  CenteringTable table_;
  std::vector<DensityGrid> weights_;
  std::vector<DensityGrid> h_;
};

DensityGrid martingale_H(const Schedule& s, const Observable& phi, std::size_t n, const Measure& mu,
                         const std::shared_ptr<const Mesh>& mesh, const ConeParams& cone);
// H_n = (P^n w)^{-1} sum_{j=1}^{n-1} P_n ... P_{j+1}(phi_j P^j w)
DensityGrid martingale_H_closed(const Schedule& s, const Observable& phi, std::size_t n, const Measure& mu,
                                const std::shared_ptr<const Mesh>& mesh);

}  // namespace lsv
