#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lsv/grid.hpp"
#include "lsv/observable.hpp"
#include "lsv/schedule.hpp"

namespace lsv::cli {

enum class ExperimentKind { Simulate, Decay, Ld, Md, Clt, Variance, QuenchedVariance, Centering, Product, Selftest };

std::string experiment_name(ExperimentKind k);
std::optional<ExperimentKind> parse_experiment(const std::string& s);

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::Selftest;
  std::string schedule = "const(0.5)";
  std::string observable = "identity";
  std::string measure = "lebesgue";     // lebesgue | tilde | stationary
  std::string density = "bump(1,0.5,0)";  // decay input: 1 + c (x + delta)^-gamma
  bool centered = true;
  std::vector<std::size_t> n = {1000};
  std::vector<double> eps = {0.1};
  std::vector<double> t = {0.5};
  double tau = 0.75;
  std::vector<double> p;                 // moment orders reported next to ld rows
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  std::size_t grid_n = 4096;
  double cone_a = 20.0;
  std::size_t K = 200;
  std::size_t draws = 20;
  std::size_t clt_n = 10000;
  double stationary_tol = 1e-9;
  std::string normalization = "self_normed";  // self_normed | sqrt_n_fixed_sigma
  std::string mode = "quenched";              // quenched | annealed
  std::optional<double> sigma2;
  double x0 = 0.3;
  unsigned workers = 0;
  std::string kernel = "auto";
  bool timing = false;
  std::string out;
};

// Parses a config JSON object; unknown keys and bad values raise ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {});
nlohmann::json config_to_json(const ExperimentConfig& c);
// Overrides one field from "key=value" where value is JSON or a bare string.
void apply_override(ExperimentConfig& c, const std::string& assignment);
void validate(const ExperimentConfig& c);

// Literal grammars:
//   schedule:   const(a) | list(a,b,...) | bernoulli(a:p,b:q[;seed=S][;stream=K])
//   observable: identity | cosine | cosine(amp,cycles) | indicator-smoothed
//               | indicator(a,b,w) | poly(c0,c1,...) | const(c) | coboundary(obs,beta)
Schedule parse_schedule(const std::string& s, std::uint64_t default_seed);
ParameterSpace parse_space(const std::string& s);  // bernoulli(...) or const(a)
Observable parse_observable(const std::string& s);

std::string alpha_set(const std::string& schedule);

}  // namespace lsv::cli
