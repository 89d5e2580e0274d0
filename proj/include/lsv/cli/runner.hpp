#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lsv/cli/config.hpp"

namespace lsv::cli {

// One CSV row. Absent optional fields are written as empty cells.
struct Record {
  std::string experiment;
  std::string alpha_set;
  std::optional<std::size_t> n;
  std::optional<double> eps_or_t;
  std::optional<double> tau;
  std::optional<double> p;
  std::optional<double> estimate;
  std::optional<double> ci_low;
  std::optional<double> ci_high;
  std::optional<std::size_t> samples;
  std::uint64_t seed = 0;
  double wall_ms = 0.0;
};

inline constexpr const char* kCsvHeader =
    "experiment,alpha_set,n,eps_or_t,tau,p,estimate,ci_low,ci_high,samples,seed,wall_ms";

struct RunResult {
  std::vector<Record> rows;
  nlohmann::json sidecar;
  bool passed = true;  // selftest outcome; true for other experiments
  std::string report;  // human-readable table (selftest)
};

// Validates, resolves and executes one experiment.
RunResult run(const ExperimentConfig& config);

// wall_ms cells stay empty unless `timing` is set, so bodies are reproducible.
std::string records_to_csv(const std::vector<Record>& rows, bool timing);
// Writes <out> and <out minus .csv>.json.
void write_outputs(const RunResult& result, const ExperimentConfig& config);

ExperimentConfig load_config(const std::string& path);

}  // namespace lsv::cli
