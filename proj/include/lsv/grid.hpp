#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lsv {

struct TransferPlan;

// Gauss-Legendre rule on [-1, 1] used for every cell-level integral.
inline constexpr int kGaussPoints = 8;
extern const std::array<double, kGaussPoints> kGaussNodes;
extern const std::array<double, kGaussPoints> kGaussWeights;

// Graded collocation mesh x_i = (i/N)^k, i = 1..N, refined towards the
// indifferent fixed point at 0. Work happens in the stencil coordinate
// r = N x^{1/k} - 1, in which nodes sit at r = 0, 1, ..., N-1.
class Mesh {
 public:
  static constexpr int kDefaultGrading = 4;
  static constexpr std::size_t kMinNodes = 64;

  // Meshes are interned: equal (n, grading) give the same instance.
  static std::shared_ptr<const Mesh> make(std::size_t n, int grading = kDefaultGrading);

  Mesh(std::size_t n, int grading);  // use make()
  Mesh(const Mesh&) = delete;
  Mesh& operator=(const Mesh&) = delete;

  std::size_t size() const noexcept { return nodes_.size(); }
  int grading() const noexcept { return grading_; }
  double alpha_mesh() const noexcept { return 1.0 - 1.0 / grading_; }
  double node(std::size_t i) const { return nodes_[i]; }
  std::span<const double> nodes() const noexcept { return nodes_; }

  double coordinate(double x) const noexcept;
  double point(double r) const noexcept;

  // Cubic Lagrange stencil for x. `head` marks x below the first node.
  struct Stencil {
    std::size_t base;
    std::array<double, 4> w;
    bool head;
  };
  Stencil stencil(double x) const noexcept;
  static std::array<double, 4> lagrange4(double q) noexcept;

  // Weights W with  sum_i W_i f_i = int_0^1 f(x) x^{-a} dx  exactly for the
  // interpolant of a grid with the given tail exponent.
  const std::vector<double>& quadrature_weights(double tail, double weight_exponent = 0.0) const;

  std::shared_ptr<const TransferPlan> transfer_plan(double alpha, double tail) const;

 private:
  std::vector<double> nodes_;
  int grading_;
  mutable std::mutex cache_mutex_;
  mutable std::map<std::pair<double, double>, std::shared_ptr<const std::vector<double>>> quad_cache_;
  mutable std::map<std::pair<double, double>, std::shared_ptr<const TransferPlan>> plan_cache_;
};

// Node values of a function on a Mesh. Between nodes the function is the
// cubic interpolant of u = x^{-tail} f in the stencil coordinate; below the
// first node it is f_1 (x/x_1)^tail.
class DensityGrid {
 public:
  DensityGrid(std::shared_ptr<const Mesh> mesh, std::vector<double> values, double tail = 0.0);

  static DensityGrid constant(std::shared_ptr<const Mesh> mesh, double c);
  // x^{-a}, carried exactly through the tail.
  static DensityGrid power(std::shared_ptr<const Mesh> mesh, double a);
  template <class F>
  static DensityGrid from_function(std::shared_ptr<const Mesh> mesh, F&& f, double tail = 0.0) {
    std::vector<double> v(mesh->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(mesh->node(i));
    return DensityGrid(std::move(mesh), std::move(v), tail);
  }

  const Mesh& mesh() const noexcept { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const noexcept { return mesh_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double value(std::size_t i) const { return values_[i]; }
  double tail() const noexcept { return tail_; }
  double node(std::size_t i) const { return mesh_->node(i); }

  double operator()(double x) const noexcept;

  DensityGrid with_tail(double tail) const { return DensityGrid(mesh_, values_, tail); }
  template <class F>
  DensityGrid map(F&& f) const {
    std::vector<double> v(values_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(values_[i]);
    return DensityGrid(mesh_, std::move(v), tail_);
  }

  DensityGrid& operator*=(double c);
  DensityGrid& operator+=(const DensityGrid& o);
  DensityGrid& operator-=(const DensityGrid& o);

  friend DensityGrid operator*(double c, DensityGrid g) { return g *= c; }
  friend DensityGrid operator*(DensityGrid g, double c) { return g *= c; }
  friend DensityGrid operator+(DensityGrid a, const DensityGrid& b) { return a += b; }
  friend DensityGrid operator-(DensityGrid a, const DensityGrid& b) { return a -= b; }
  // Node-wise product/quotient; tails add/subtract.
  friend DensityGrid operator*(const DensityGrid& a, const DensityGrid& b);
  friend DensityGrid operator/(const DensityGrid& a, const DensityGrid& b);

 private:
  void require_same_mesh(const DensityGrid& o) const;

  std::shared_ptr<const Mesh> mesh_;
  std::vector<double> values_;
  std::vector<double> scaled_;  // x_i^{-tail} f_i, empty when tail == 0
  double tail_;
};

double pairwise_sum(std::span<const double> v) noexcept;
double pairwise_dot(std::span<const double> a, std::span<const double> b);

// int_0^1 f(x) x^{-a} dx for the grid interpolant.
double integrate(const DensityGrid& f, double weight_exponent = 0.0);
double l1_norm(const DensityGrid& f, double weight_exponent = 0.0);
double sup_norm(const DensityGrid& f) noexcept;

namespace detail {
void function_panels(const Mesh& mesh, std::span<const double> breakpoints,
                     std::vector<std::pair<double, double>>& panels);
}

// Composite Gauss-Legendre in the stencil coordinate over every mesh cell
// (and the head [0, x_1]), with extra splits at the given breakpoints. Use
// this for integrands that are not grid interpolants, e.g. g o T.
template <class F>
double integrate_function(const Mesh& mesh, F&& f, std::span<const double> breakpoints = {}) {
  std::vector<std::pair<double, double>> panels;
  detail::function_panels(mesh, breakpoints, panels);
  const double n = static_cast<double>(mesh.size());
  const int k = mesh.grading();
  std::vector<double> parts(panels.size());
  for (std::size_t p = 0; p < panels.size(); ++p) {
    auto [r0, r1] = panels[p];
    double half = 0.5 * (r1 - r0), mid = 0.5 * (r1 + r0), acc = 0.0;
    for (int q = 0; q < kGaussPoints; ++q) {
      double s = (mid + half * kGaussNodes[q] + 1.0) / n;
      double x = mesh.point(mid + half * kGaussNodes[q]);
      double jac = k * std::pow(s, k - 1) / n;
      acc += kGaussWeights[q] * jac * f(x);
    }
    parts[p] = acc * half;
  }
  return pairwise_sum(parts);
}

// CSV with header "node,value"; a leading '#' line records the mesh grading
// and tail exponent.
std::string to_csv(const DensityGrid& g);
void write_csv(const DensityGrid& g, const std::string& path);
DensityGrid from_csv(const std::string& text);
DensityGrid read_csv(const std::string& path);

}  // namespace lsv
