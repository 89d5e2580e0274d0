#include "lsv/grid.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "lsv/format.hpp"
#include "lsv/transfer.hpp"

namespace lsv {

const std::array<double, kGaussPoints> kGaussNodes = {
    -0.9602898564975362316835609, -0.7966664774136267395915539, -0.5255324099163289858177390,
    -0.1834346424956498049394761, 0.1834346424956498049394761,  0.5255324099163289858177390,
    0.7966664774136267395915539,  0.9602898564975362316835609};
const std::array<double, kGaussPoints> kGaussWeights = {
    0.1012285362903762591525314, 0.2223810344533744705443560, 0.3137066458778872873379622,
    0.3626837833783619829651504, 0.3626837833783619829651504, 0.3137066458778872873379622,
    0.2223810344533744705443560, 0.1012285362903762591525314};

namespace {

double int_power(double s, int k) {
  double x = 1.0;
  for (int i = 0; i < k; ++i) x *= s;
  return x;
}

}  // namespace

std::shared_ptr<const Mesh> Mesh::make(std::size_t n, int grading) {
  static std::mutex registry_mutex;
  static std::map<std::pair<std::size_t, int>, std::weak_ptr<const Mesh>> registry;
  std::lock_guard lock(registry_mutex);
  auto& slot = registry[{n, grading}];
  if (auto m = slot.lock()) return m;
  auto m = std::make_shared<const Mesh>(n, grading);
  slot = m;
  return m;
}

Mesh::Mesh(std::size_t n, int grading) : grading_(grading) {
  if (n < kMinNodes) {
    throw std::invalid_argument("Mesh: need at least " + std::to_string(kMinNodes) + " nodes, got " +
                                std::to_string(n));
  }
  if (grading < 1 || grading > 8) throw std::invalid_argument("Mesh: grading must be in [1, 8]");
  nodes_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    nodes_[i] = int_power(static_cast<double>(i + 1) / static_cast<double>(n), grading);
  }
  nodes_.back() = 1.0;
}

double Mesh::coordinate(double x) const noexcept {
  double s;
  switch (grading_) {
    case 1: s = x; break;
    case 2: s = std::sqrt(x); break;
    case 4: s = std::sqrt(std::sqrt(x)); break;
    default: s = std::pow(x, 1.0 / grading_);
  }
  return static_cast<double>(nodes_.size()) * s - 1.0;
}

double Mesh::point(double r) const noexcept {
  return int_power((r + 1.0) / static_cast<double>(nodes_.size()), grading_);
}

std::array<double, 4> Mesh::lagrange4(double q) noexcept {
  double q1 = q - 1.0, q2 = q - 2.0, q3 = q - 3.0;
  return {-q1 * q2 * q3 / 6.0, q * q2 * q3 / 2.0, -q * q1 * q3 / 2.0, q * q1 * q2 / 6.0};
}

Mesh::Stencil Mesh::stencil(double x) const noexcept {
  double r = coordinate(x);
  if (!(r >= 0.0)) return {0, {1.0, 0.0, 0.0, 0.0}, true};
  const std::size_t n = nodes_.size();
  std::size_t i = std::min(static_cast<std::size_t>(r), n - 1);
  std::size_t b = i == 0 ? 0 : std::min(i - 1, n - 4);
  return {b, lagrange4(r - static_cast<double>(b)), false};
}

const std::vector<double>& Mesh::quadrature_weights(double tail, double a) const {
  std::lock_guard lock(cache_mutex_);
  auto& slot = quad_cache_[{tail, a}];
  if (slot) return *slot;
  const double e = tail - a + 1.0;
  if (!(e > 0.0)) {
    throw std::domain_error("quadrature: x^(" + format_double(tail - a) + ") is not integrable at 0");
  }
  const std::size_t n = nodes_.size();
  const double nd = static_cast<double>(n);
  const double gamma = grading_ * e - 1.0;
  std::vector<double> scale(n);
  for (std::size_t j = 0; j < n; ++j) scale[j] = tail == 0.0 ? 1.0 : std::pow(nodes_[j], -tail);
  auto w = std::make_shared<std::vector<double>>(n, 0.0);
  (*w)[0] += std::pow(nodes_[0], 1.0 - a) / e;
  for (std::size_t c = 0; c + 1 < n; ++c) {
    std::size_t b = c == 0 ? 0 : std::min(c - 1, n - 4);
    for (int q = 0; q < kGaussPoints; ++q) {
      double r = static_cast<double>(c) + 0.5 + 0.5 * kGaussNodes[q];
      double s = (r + 1.0) / nd;
      double fac = 0.5 * kGaussWeights[q] * (grading_ / nd) * std::pow(s, gamma);
      auto l = lagrange4(r - static_cast<double>(b));
      for (int t = 0; t < 4; ++t) (*w)[b + t] += fac * l[t] * scale[b + t];
    }
  }
  slot = std::move(w);
  return *slot;
}

std::shared_ptr<const TransferPlan> Mesh::transfer_plan(double alpha, double tail) const {
  {
    std::lock_guard lock(cache_mutex_);
    auto it = plan_cache_.find({alpha, tail});
    if (it != plan_cache_.end()) return it->second;
  }
  auto plan = build_transfer_plan(*this, alpha, tail);
  std::lock_guard lock(cache_mutex_);
  auto [it, inserted] = plan_cache_.emplace(std::make_pair(alpha, tail), std::move(plan));
  return it->second;
}

DensityGrid::DensityGrid(std::shared_ptr<const Mesh> mesh, std::vector<double> values, double tail)
    : mesh_(std::move(mesh)), values_(std::move(values)), tail_(tail) {
  if (!mesh_) throw std::invalid_argument("DensityGrid: null mesh");
  if (values_.size() != mesh_->size()) {
    throw std::invalid_argument("DensityGrid: " + std::to_string(values_.size()) + " values for a mesh of " +
                                std::to_string(mesh_->size()) + " nodes");
  }
  if (tail_ != 0.0) {
    scaled_.resize(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) scaled_[i] = values_[i] * std::pow(mesh_->node(i), -tail_);
  }
}

DensityGrid DensityGrid::constant(std::shared_ptr<const Mesh> mesh, double c) {
  std::vector<double> v(mesh->size(), c);
  return DensityGrid(std::move(mesh), std::move(v), 0.0);
}

DensityGrid DensityGrid::power(std::shared_ptr<const Mesh> mesh, double a) {
  std::vector<double> v(mesh->size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::pow(mesh->node(i), -a);
  return DensityGrid(std::move(mesh), std::move(v), -a);
}

double DensityGrid::operator()(double x) const noexcept {
  auto st = mesh_->stencil(x);
  if (st.head) {
    if (tail_ == 0.0) return values_[0];
    return values_[0] * std::pow(x / mesh_->node(0), tail_);
  }
  const double* u = (tail_ == 0.0 ? values_.data() : scaled_.data()) + st.base;
  double acc = st.w[0] * u[0] + st.w[1] * u[1] + st.w[2] * u[2] + st.w[3] * u[3];
  return tail_ == 0.0 ? acc : acc * std::pow(x, tail_);
}

void DensityGrid::require_same_mesh(const DensityGrid& o) const {
  if (mesh_ != o.mesh_) throw std::invalid_argument("DensityGrid: operands live on different meshes");
}

DensityGrid& DensityGrid::operator*=(double c) {
  for (auto& v : values_) v *= c;
  for (auto& v : scaled_) v *= c;
  return *this;
}

DensityGrid& DensityGrid::operator+=(const DensityGrid& o) {
  require_same_mesh(o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  *this = DensityGrid(mesh_, std::move(values_), std::min(tail_, o.tail_));
  return *this;
}

DensityGrid& DensityGrid::operator-=(const DensityGrid& o) {
  require_same_mesh(o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  *this = DensityGrid(mesh_, std::move(values_), std::min(tail_, o.tail_));
  return *this;
}

DensityGrid operator*(const DensityGrid& a, const DensityGrid& b) {
  a.require_same_mesh(b);
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.values_[i] * b.values_[i];
  return DensityGrid(a.mesh_, std::move(v), a.tail_ + b.tail_);
}

DensityGrid operator/(const DensityGrid& a, const DensityGrid& b) {
  a.require_same_mesh(b);
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.values_[i] / b.values_[i];
  return DensityGrid(a.mesh_, std::move(v), a.tail_ - b.tail_);
}

double pairwise_sum(std::span<const double> v) noexcept {
  if (v.size() <= 16) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  std::size_t h = v.size() / 2;
  return pairwise_sum(v.first(h)) + pairwise_sum(v.subspan(h));
}

double pairwise_dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("pairwise_dot: length mismatch");
  std::vector<double> prod(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) prod[i] = a[i] * b[i];
  return pairwise_sum(prod);
}

double integrate(const DensityGrid& f, double weight_exponent) {
  return pairwise_dot(f.mesh().quadrature_weights(f.tail(), weight_exponent), f.values());
}

double l1_norm(const DensityGrid& f, double weight_exponent) {
  return integrate(f.map([](double v) { return std::abs(v); }), weight_exponent);
}

double sup_norm(const DensityGrid& f) noexcept {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

namespace detail {

void function_panels(const Mesh& mesh, std::span<const double> breakpoints,
                     std::vector<std::pair<double, double>>& panels) {
  const std::size_t n = mesh.size();
  std::vector<double> cuts;
  for (double b : breakpoints) {
    if (b > 0.0 && b < 1.0) cuts.push_back(mesh.coordinate(b));
  }
  std::sort(cuts.begin(), cuts.end());
  panels.clear();
  panels.reserve(n + cuts.size());
  std::size_t ci = 0;
  for (std::ptrdiff_t c = -1; c + 1 < static_cast<std::ptrdiff_t>(n); ++c) {
    double lo = static_cast<double>(c), hi = lo + 1.0;
    while (ci < cuts.size() && cuts[ci] <= lo) ++ci;
    while (ci < cuts.size() && cuts[ci] < hi) {
      panels.emplace_back(lo, cuts[ci]);
      lo = cuts[ci++];
    }
    panels.emplace_back(lo, hi);
  }
}

}  // namespace detail

std::string to_csv(const DensityGrid& g) {
  std::string out = "# grading=" + std::to_string(g.mesh().grading()) + " tail=" + format_double(g.tail()) + "\n";
  out += "node,value\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    out += format_double(g.node(i));
    out += ',';
    out += format_double(g.value(i));
    out += '\n';
  }
  return out;
}

void write_csv(const DensityGrid& g, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_csv: cannot open " + path);
  os << to_csv(g);
}

DensityGrid from_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  int grading = Mesh::kDefaultGrading;
  double tail = 0.0;
  std::vector<double> nodes, values;
  bool header = false;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ts(line.substr(1));
      std::string tok;
      while (ts >> tok) {
        if (tok.rfind("grading=", 0) == 0) grading = std::stoi(tok.substr(8));
        if (tok.rfind("tail=", 0) == 0) tail = std::stod(tok.substr(5));
      }
      continue;
    }
    if (!header) {
      if (line != "node,value") throw std::invalid_argument("from_csv: expected header node,value");
      header = true;
      continue;
    }
    auto comma = line.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("from_csv: malformed row '" + line + "'");
    nodes.push_back(std::stod(line.substr(0, comma)));
    values.push_back(std::stod(line.substr(comma + 1)));
  }
  auto mesh = Mesh::make(nodes.size(), grading);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (std::abs(nodes[i] - mesh->node(i)) > 1e-12 * mesh->node(i)) {
      throw std::invalid_argument("from_csv: node " + std::to_string(i) + " does not follow the mesh law");
    }
  }
  return DensityGrid(std::move(mesh), std::move(values), tail);
}

DensityGrid read_csv(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_csv: cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return from_csv(ss.str());
}

}  // namespace lsv
