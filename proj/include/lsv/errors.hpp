#pragma once

#include <stdexcept>
#include <string>

namespace lsv {

// Iterative solver stopped at its cap; carries the last residual.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual, std::size_t iterations)
      : std::runtime_error(what), residual_(residual), iterations_(iterations) {}
  double residual() const noexcept { return residual_; }
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  std::size_t iterations_;
};

// A density that is bounded below in theory dropped under the floor on the grid.
class GridBreakdown : public std::runtime_error {
 public:
  GridBreakdown(const std::string& what, std::size_t node, double value, double floor)
      : std::runtime_error(what), node_(node), value_(value), floor_(floor) {}
  std::size_t node() const noexcept { return node_; }
  double value() const noexcept { return value_; }
  double floor() const noexcept { return floor_; }

 private:
  std::size_t node_;
  double value_;
  double floor_;
};

class DegenerateVariance : public std::runtime_error {
 public:
  DegenerateVariance(const std::string& what, double sigma2)
      : std::runtime_error(what), sigma2_(sigma2) {}
  double sigma2() const noexcept { return sigma2_; }

 private:
  double sigma2_;
};

class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, std::string reason)
      : std::invalid_argument(field + ": " + reason), field_(std::move(field)), reason_(std::move(reason)) {}
  const std::string& field() const noexcept { return field_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string field_;
  std::string reason_;
};

}  // namespace lsv
