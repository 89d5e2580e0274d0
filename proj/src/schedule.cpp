#include "lsv/schedule.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "lsv/format.hpp"

namespace lsv {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

ParameterSpace::ParameterSpace(std::vector<double> alphas, std::vector<double> probs,
                               std::optional<double> alpha_cap, Duplicates duplicates) {
  if (alphas.empty()) throw std::invalid_argument("ParameterSpace: empty set");
  if (alphas.size() != probs.size()) {
    throw std::invalid_argument("ParameterSpace: alphas and probs differ in length");
  }
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw std::invalid_argument("ParameterSpace: negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("ParameterSpace: probabilities sum to " + format_double(total));
  }
  double amax = 0.0;
  for (double a : alphas) {
    omegas_.emplace_back(a);
    amax = std::max(amax, a);
  }
  if (duplicates == Duplicates::Reject) {
    auto sorted = alphas;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw std::invalid_argument("ParameterSpace: repeated alpha");
    }
  }
  alpha_cap_ = alpha_cap.value_or(amax);
  if (!(alpha_cap_ >= amax && alpha_cap_ < 1.0)) {
    throw std::invalid_argument("ParameterSpace: alpha_cap must satisfy max(alpha) <= cap < 1");
  }
  probs_ = std::move(probs);
  cumulative_.resize(probs_.size());
  double c = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    c += probs_[i];
    cumulative_[i] = c;
  }
}

ParameterSpace ParameterSpace::single(double alpha) { return ParameterSpace({alpha}, {1.0}); }

std::size_t ParameterSpace::pick(double u) const noexcept {
  std::size_t last = cumulative_.size() - 1;
  for (std::size_t i = 0; i < last; ++i) {
    if (u < cumulative_[i]) return i;
  }
  return last;
}

std::string ParameterSpace::describe() const {
  std::string out;
  for (std::size_t i = 0; i < omegas_.size(); ++i) {
    if (i) out += ',';
    out += format_double(omegas_[i].alpha()) + ':' + format_double(probs_[i]);
  }
  return out;
}

Schedule Schedule::constant(MapParam beta) {
  Schedule s;
  s.kind_ = Kind::Constant;
  s.list_ = {beta};
  return s;
}

Schedule Schedule::fixed_list(std::vector<MapParam> maps) {
  Schedule s;
  s.kind_ = Kind::FixedList;
  s.list_ = std::move(maps);
  return s;
}

Schedule Schedule::bernoulli(ParameterSpace space, std::uint64_t seed, std::uint64_t stream) {
  Schedule s;
  s.kind_ = Kind::Bernoulli;
  s.space_ = std::move(space);
  s.seed_ = seed;
  s.stream_ = stream;
  s.rng_ = CounterRng(seed, StreamDomain::Schedule);
  return s;
}

MapParam Schedule::symbol_at(std::size_t k) const {
  if (k == 0) throw std::out_of_range("symbol_at: indices start at 1");
  switch (kind_) {
    case Kind::Constant:
      return list_.front();
    case Kind::FixedList:
      if (k > list_.size()) {
        throw std::out_of_range("symbol_at: k=" + std::to_string(k) + " past list of length " +
                                std::to_string(list_.size()));
      }
      return list_[k - 1];
    case Kind::Bernoulli:
      return space_->omega(space_->pick(rng_.uniform(stream_, offset_ + k)));
  }
  return list_.front();
}

std::vector<double> Schedule::alphas(std::size_t n) const {
  std::vector<double> out(n);
  for (std::size_t k = 1; k <= n; ++k) out[k - 1] = symbol_at(k).alpha();
  return out;
}

double Schedule::orbit(double x0, std::size_t n) const {
  if (!(x0 >= 0.0 && x0 <= 1.0)) throw std::domain_error("orbit: x0 outside [0,1]");
  double x = x0;
  for (std::size_t k = 1; k <= n; ++k) x = detail::step(symbol_at(k).alpha(), x);
  return x;
}

std::vector<double> Schedule::orbit_path(double x0, std::size_t n) const {
  if (!(x0 >= 0.0 && x0 <= 1.0)) throw std::domain_error("orbit: x0 outside [0,1]");
  std::vector<double> path(n + 1);
  path[0] = x0;
  for (std::size_t k = 1; k <= n; ++k) path[k] = detail::step(symbol_at(k).alpha(), path[k - 1]);
  return path;
}

Schedule Schedule::shift(std::size_t k) const {
  Schedule s = *this;
  switch (kind_) {
    case Kind::Constant:
      break;
    case Kind::FixedList:
      if (k > list_.size()) throw std::out_of_range("shift: past end of list");
      s.list_.erase(s.list_.begin(), s.list_.begin() + static_cast<std::ptrdiff_t>(k));
      break;
    case Kind::Bernoulli:
      s.offset_ += k;
      break;
  }
  return s;
}

std::optional<std::size_t> Schedule::length() const noexcept {
  if (kind_ == Kind::FixedList) return list_.size();
  return std::nullopt;
}

double Schedule::max_alpha() const noexcept {
  if (kind_ == Kind::Bernoulli) return space_->alpha_cap();
  double m = 0.0;
  for (auto p : list_) m = std::max(m, p.alpha());
  return m;
}

std::string Schedule::describe() const {
  switch (kind_) {
    case Kind::Constant:
      return "const(" + format_double(list_.front().alpha()) + ")";
    case Kind::FixedList: {
      std::string out = "list(";
      for (std::size_t i = 0; i < list_.size(); ++i) {
        if (i) out += ',';
        out += format_double(list_[i].alpha());
      }
      return out + ")";
    }
    case Kind::Bernoulli: {
      std::string out = "bernoulli(" + space_->describe() + ";seed=" + std::to_string(seed_);
      if (stream_) out += ";stream=" + std::to_string(stream_);
      if (offset_) out += ";offset=" + std::to_string(offset_);
      return out + ")";
    }
  }
  return {};
}

Schedule materialize(const Schedule& s, std::size_t n) {
  std::vector<MapParam> maps;
  maps.reserve(n);
  for (std::size_t k = 1; k <= n; ++k) maps.push_back(s.symbol_at(k));
  return Schedule::fixed_list(std::move(maps));
}

Schedule reverse_prefix(const Schedule& s, std::size_t n) {
  if (s.kind() != Schedule::Kind::FixedList) {
    throw std::invalid_argument("reverse_prefix: only defined for FixedList schedules");
  }
  std::vector<MapParam> maps;
  maps.reserve(n);
  for (std::size_t k = n; k >= 1; --k) maps.push_back(s.symbol_at(k));
  return Schedule::fixed_list(std::move(maps));
}

}  // namespace lsv
