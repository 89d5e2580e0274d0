#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lsv/cli/config.hpp"
#include "lsv/cli/runner.hpp"
#include "lsv/errors.hpp"

namespace {

enum Exit { kOk = 0, kSelftestFailed = 1, kConfig = 2, kNumerical = 3, kOther = 4 };

int fail(int code, const std::string& kind, const std::string& message, nlohmann::json extra = {}) {
  nlohmann::json j = {{"error", kind}, {"message", message}};
  if (extra.is_object()) j.update(extra);
  std::cerr << j.dump() << "\n";
  return code;
}

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::optional<std::size_t> grid_n;
  std::optional<unsigned> workers;
  std::string out;
  std::string kernel;
  std::vector<std::string> overrides;
  bool timing = false;
};

const char* describe(lsv::cli::ExperimentKind kind) {
  using K = lsv::cli::ExperimentKind;
  switch (kind) {
    case K::Simulate: return "orbit and Birkhoff sum along one schedule";
    case K::Decay: return "L1 decay of P^n (f - m(f))";
    case K::Ld: return "large deviation probabilities";
    case K::Md: return "moderate deviation probabilities";
    case K::Clt: return "quenched or annealed CLT check";
    case K::Variance: return "annealed variance by correlation sums";
    case K::QuenchedVariance: return "sigma_n^2(omega)/n across omega draws";
    case K::Centering: return "centering drift across omega draws";
    case K::Product: return "fibred product system variance";
    case K::Selftest: return "internal consistency suites";
  }
  return "";
}

int execute(lsv::cli::ExperimentKind kind, const Flags& f) {
  using namespace lsv::cli;
  ExperimentConfig cfg;
  cfg.experiment = kind;
  if (!f.config.empty()) {
    cfg = load_config(f.config);
    if (cfg.experiment != kind) {
      throw lsv::ConfigError("experiment", "config is for '" + experiment_name(cfg.experiment) +
                                               "' but the subcommand is '" + experiment_name(kind) + "'");
    }
  }
  for (const auto& o : f.overrides) apply_override(cfg, o);
  if (f.seed) cfg.seed = *f.seed;
  if (f.samples) cfg.samples = *f.samples;
  if (f.grid_n) cfg.grid_n = *f.grid_n;
  if (f.workers) cfg.workers = *f.workers;
  if (!f.kernel.empty()) cfg.kernel = f.kernel;
  if (!f.out.empty()) cfg.out = f.out;
  if (f.timing) cfg.timing = true;

  auto result = run(cfg);
  if (!result.report.empty()) std::cout << result.report;
  if (cfg.out.empty()) {
    std::cout << records_to_csv(result.rows, cfg.timing);
  } else {
    write_outputs(result, cfg);
  }
  return result.passed ? kOk : kSelftestFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for random compositions of intermittent interval maps"};
  app.require_subcommand(1);
  Flags flags;
  std::vector<std::pair<CLI::App*, lsv::cli::ExperimentKind>> subs;
  for (auto kind : {lsv::cli::ExperimentKind::Simulate, lsv::cli::ExperimentKind::Decay,
                    lsv::cli::ExperimentKind::Ld, lsv::cli::ExperimentKind::Md, lsv::cli::ExperimentKind::Clt,
                    lsv::cli::ExperimentKind::Variance, lsv::cli::ExperimentKind::QuenchedVariance,
                    lsv::cli::ExperimentKind::Centering, lsv::cli::ExperimentKind::Product,
                    lsv::cli::ExperimentKind::Selftest}) {
    auto* sub = app.add_subcommand(lsv::cli::experiment_name(kind), describe(kind));
    sub->add_option("--config", flags.config, "JSON experiment config");
    sub->add_option("--seed", flags.seed, "master seed");
    sub->add_option("--samples", flags.samples, "Monte Carlo sample count");
    sub->add_option("--grid-n", flags.grid_n, "transfer-operator mesh nodes");
    sub->add_option("--workers", flags.workers, "worker threads (0 = all cores)");
    sub->add_option("--kernel", flags.kernel, "auto | scalar | avx2");
    sub->add_option("--out", flags.out, "CSV output path (JSON sidecar next to it)");
    sub->add_option("--set", flags.overrides, "override a config field, key=value");
    sub->add_flag("--timing", flags.timing, "fill the wall_ms column");
    subs.emplace_back(sub, kind);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail(kConfig, "ConfigError", e.what(), {{"field", "argv"}});
  }

  try {
    for (auto& [sub, kind] : subs) {
      if (sub->parsed()) return execute(kind, flags);
    }
    return kOther;
  } catch (const lsv::ConfigError& e) {
    return fail(kConfig, "ConfigError", e.what(), {{"field", e.field()}});
  } catch (const lsv::GridBreakdown& e) {
    return fail(kNumerical, "GridBreakdown", e.what(), {{"node", e.node()}, {"value", e.value()}, {"floor", e.floor()}});
  } catch (const lsv::ConvergenceError& e) {
    return fail(kNumerical, "ConvergenceError", e.what(), {{"residual", e.residual()}, {"iterations", e.iterations()}});
  } catch (const lsv::DegenerateVariance& e) {
    return fail(kNumerical, "DegenerateVariance", e.what(), {{"sigma2", e.sigma2()}});
  } catch (const std::exception& e) {
    return fail(kOther, "Error", e.what());
  }
}
