#include "lsv/cli/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

#include "lsv/errors.hpp"
#include "lsv/experiments.hpp"
#include "lsv/format.hpp"
#include "lsv/kernels/kernels.hpp"
#include "lsv/martingale.hpp"
#include "lsv/selftest.hpp"
#include "lsv/stats.hpp"
#include "lsv/transfer.hpp"

namespace lsv::cli {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct Context {
  const ExperimentConfig& cfg;
  std::string aset;
  std::vector<Record> rows;
  Clock::time_point t0 = Clock::now();

  Record& add(std::string experiment) {
    Record r;
    r.experiment = std::move(experiment);
    r.alpha_set = aset;
    r.seed = cfg.seed;
    r.wall_ms = ms_since(t0);
    rows.push_back(std::move(r));
    return rows.back();
  }
  McOptions mc() const {
    McOptions o;
    o.seed = cfg.seed;
    o.samples = cfg.samples;
    o.workers = cfg.workers;
    o.mesh = Mesh::make(cfg.grid_n);
    o.stationary_tol = cfg.stationary_tol;
    return o;
  }
};

Measure resolve_measure(const ExperimentConfig& c, const Schedule& s) {
  if (c.measure == "lebesgue") return Measure::lebesgue();
  if (c.measure == "tilde") return Measure::tilde(s.max_alpha());
  ParameterSpace space = s.space() ? *s.space() : ParameterSpace::single(s.max_alpha());
  return Measure::stationary(space, c.stationary_tol, Mesh::make(c.grid_n));
}

// log-log slope of p_hat against n; zero estimates fall back to the Wilson
// upper limit so the fit stays one-sided.
double deviation_slope(const std::vector<DeviationEstimate>& est) {
  std::vector<double> x, y;
  for (const auto& e : est) {
    x.push_back(static_cast<double>(e.n));
    y.push_back(e.p_hat > 0.0 ? e.p_hat : e.ci_high);
  }
  return stats::loglog_fit(x, y).slope;
}

void run_simulate(Context& ctx) {
  const auto& c = ctx.cfg;
  Schedule s = parse_schedule(c.schedule, c.seed);
  Observable phi = parse_observable(c.observable);
  std::size_t n_max = c.n.back();
  auto path = s.orbit_path(c.x0, n_max);
  double sum = 0.0;
  std::size_t next = 0;
  for (std::size_t k = 1; k <= n_max; ++k) {
    sum += phi(path[k]);
    if (k == c.n[next]) {
      auto& o = ctx.add("simulate.orbit");
      o.n = k;
      o.estimate = path[k];
      auto& r = ctx.add("simulate.sum");
      r.n = k;
      r.estimate = sum;
      ++next;
    }
  }
}

void run_decay(Context& ctx) {
  const auto& c = ctx.cfg;
  Schedule s = parse_schedule(c.schedule, c.seed);
  auto mesh = Mesh::make(c.grid_n);
  std::string d = c.density.substr(c.density.find('(') + 1);
  d.pop_back();
  std::stringstream ss(d);
  double amp, gamma, delta;
  char comma;
  ss >> amp >> comma >> gamma >> comma >> delta;
  auto f = DensityGrid::from_function(
      mesh, [&](double x) { return 1.0 + amp * std::pow(x + delta, -gamma); }, delta == 0.0 ? -gamma : 0.0);
  ConeParams cone(c.cone_a, s.max_alpha());
  auto curve = decay_curve(s, f, c.n.back(), cone);
  std::vector<double> x, y;
  for (std::size_t n : c.n) {
    auto& r = ctx.add("decay");
    r.n = n;
    r.estimate = curve[n];
    x.push_back(static_cast<double>(n));
    y.push_back(curve[n]);
  }
  if (c.n.size() >= 2) {
    auto& r = ctx.add("decay.slope");
    r.n = c.n.back();
    r.estimate = stats::loglog_fit(x, y).slope;
  }
}

void add_deviation_rows(Context& ctx, const std::string& name, const std::vector<DeviationEstimate>& est,
                        double eps_or_t, std::optional<double> tau) {
  for (const auto& e : est) {
    auto& r = ctx.add(name);
    r.n = e.n;
    r.eps_or_t = eps_or_t;
    r.tau = tau;
    r.estimate = e.p_hat;
    r.ci_low = e.ci_low;
    r.ci_high = e.ci_high;
    r.samples = e.samples;
  }
  if (est.size() >= 2) {
    auto& r = ctx.add(name + ".slope");
    r.n = est.back().n;
    r.eps_or_t = eps_or_t;
    r.tau = tau;
    r.estimate = deviation_slope(est);
    r.samples = est.back().samples;
  }
}

void run_ld(Context& ctx) {
  const auto& c = ctx.cfg;
  Schedule s = parse_schedule(c.schedule, c.seed);
  Observable phi = parse_observable(c.observable);
  Measure mu = resolve_measure(c, s);
  for (double eps : c.eps) {
    add_deviation_rows(ctx, "ld", deviation_curve(s, phi, c.n, eps, mu, c.centered, ctx.mc()), eps, std::nullopt);
  }
  for (double p : c.p) {
    for (const auto& m : moment_estimate(s, phi, c.n, p, mu, ctx.mc())) {
      auto& r = ctx.add("ld.moment");
      r.n = m.n;
      r.p = p;
      r.estimate = m.value;
      r.ci_low = m.value - stats::kZ95 * m.stderr_value;
      r.ci_high = m.value + stats::kZ95 * m.stderr_value;
      r.samples = c.samples;
    }
  }
}

void run_md(Context& ctx) {
  const auto& c = ctx.cfg;
  Schedule s = parse_schedule(c.schedule, c.seed);
  Observable phi = parse_observable(c.observable);
  Measure mu = resolve_measure(c, s);
  for (double t : c.t) add_deviation_rows(ctx, "md", moderate_deviation(s, phi, c.n, c.tau, t, mu, ctx.mc()), t, c.tau);
  const double beta = 1.0 / s.max_alpha() - 1.0;
  auto& r = ctx.add("md.rate_exponent");
  r.tau = c.tau;
  r.estimate = -beta + 2.0 * (1.0 - c.tau);
}

void add_clt_rows(Context& ctx, const CltReport& rep) {
  auto& k = ctx.add("clt.ks");
  k.n = rep.n;
  k.estimate = rep.ks;
  k.samples = rep.samples;
  auto& s2 = ctx.add("clt.sigma2");
  s2.n = rep.n;
  s2.estimate = rep.sigma2_used;
  auto& mc = ctx.add("clt.mc_variance");
  mc.n = rep.n;
  mc.estimate = rep.mc_variance;
  mc.ci_low = rep.mc_variance - stats::kZ95 * rep.mc_variance_stderr;
  mc.ci_high = rep.mc_variance + stats::kZ95 * rep.mc_variance_stderr;
  mc.samples = rep.samples;
}

void run_clt(Context& ctx) {
  const auto& c = ctx.cfg;
  Observable phi = parse_observable(c.observable);
  for (std::size_t n : c.n) {
    if (c.mode == "annealed") {
      auto rep = annealed_clt(parse_space(c.schedule), phi, n, ctx.mc(),
                              c.normalization == "sqrt_n_fixed_sigma" ? c.sigma2 : std::nullopt, c.K);
      add_clt_rows(ctx, rep);
    } else {
      Schedule s = parse_schedule(c.schedule, c.seed);
      auto norm = c.normalization == "self_normed" ? Normalization::SelfNormed : Normalization::SqrtNFixedSigma;
      add_clt_rows(ctx, quenched_clt(s, phi, n, norm, ctx.mc(), c.sigma2));
    }
  }
}

void run_variance(Context& ctx) {
  const auto& c = ctx.cfg;
  auto rep = annealed_variance(parse_space(c.schedule), parse_observable(c.observable), c.K, ctx.mc());
  auto& r = ctx.add("variance.sigma2");
  r.n = c.K;
  r.estimate = rep.sigma2;
  r.ci_low = rep.sigma2 - rep.stderr_estimate;
  r.ci_high = rep.sigma2 + rep.stderr_estimate;
  auto& m = ctx.add("variance.mu_phi");
  m.estimate = rep.mu_phi;
  auto& t = ctx.add("variance.tail_settled");
  t.n = c.K;
  t.estimate = rep.tail_settled ? 1.0 : 0.0;
}

void run_quenched_variance(Context& ctx) {
  const auto& c = ctx.cfg;
  ParameterSpace space = parse_space(c.schedule);
  Observable phi = parse_observable(c.observable);
  auto ann = annealed_variance(space, phi, c.K, ctx.mc());
  std::vector<double> values;
  for (std::size_t n : c.n) {
    values.clear();
    for (std::size_t d = 0; d < c.draws; ++d) {
      Schedule omega = Schedule::bernoulli(space, c.seed, d);
      auto q = quenched_variance(omega, phi, n, ctx.mc());
      values.push_back(q.value);
      auto& r = ctx.add("quenched_variance");
      r.n = n;
      r.p = static_cast<double>(d);
      r.estimate = q.value;
      r.ci_low = q.value - stats::kZ95 * q.stderr_value;
      r.ci_high = q.value + stats::kZ95 * q.stderr_value;
      r.samples = c.samples;
    }
    auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    double mean = stats::moments(values).mean;
    auto& sp = ctx.add("quenched_variance.spread");
    sp.n = n;
    sp.estimate = (*hi - *lo) / mean;
    auto& dev = ctx.add("quenched_variance.max_rel_dev_annealed");
    dev.n = n;
    double worst = 0.0;
    for (double v : values) worst = std::max(worst, std::abs(v - ann.sigma2) / ann.sigma2);
    dev.estimate = worst;
  }
  auto& a = ctx.add("quenched_variance.annealed_sigma2");
  a.n = c.K;
  a.estimate = ann.sigma2;
}

void run_centering(Context& ctx) {
  const auto& c = ctx.cfg;
  ParameterSpace space = parse_space(c.schedule);
  Observable phi = parse_observable(c.observable);
  auto rep = centering_diagnostic(space, phi, c.n, c.draws, ctx.mc());
  for (std::size_t j = 0; j < space.size(); ++j) {
    auto& r = ctx.add("centering.mu_beta");
    r.alpha_set = format_double(space.omega(j).alpha());
    r.estimate = rep.mu_beta[j];
  }
  double gap = 0.0;
  for (double a : rep.mu_beta) {
    for (double b : rep.mu_beta) gap = std::max(gap, std::abs(a - b));
  }
  ctx.add("centering.mu_gap").estimate = gap;
  for (std::size_t i = 0; i < rep.n_list.size(); ++i) {
    auto& r = ctx.add("centering.drift_variance");
    r.n = rep.n_list[i];
    r.estimate = rep.drift_variance[i];
    r.samples = rep.draws;
  }
  auto& ratio = ctx.add("centering.drift_variance_ratio");
  ratio.n = rep.n_list.back();
  ratio.estimate = rep.drift_variance.back() / rep.drift_variance.front();
  if (c.clt_n > 0) {
    Schedule omega = Schedule::bernoulli(space, c.seed, 0);
    auto clt = quenched_clt(omega, phi, c.clt_n, Normalization::SelfNormed, ctx.mc());
    auto& r = ctx.add("centering.quenched_clt_ks");
    r.n = clt.n;
    r.estimate = clt.ks;
    r.samples = clt.samples;
  }
}

void run_product(Context& ctx) {
  const auto& c = ctx.cfg;
  ParameterSpace space = parse_space(c.schedule);
  Observable phi = parse_observable(c.observable);
  for (std::size_t n : c.n) {
    auto rep = product_system_test(space, phi, n, ctx.mc(), c.K);
    ctx.add("product.sigma2").n = n;
    ctx.rows.back().estimate = rep.sigma2;
    auto& t = ctx.add("product.sigma_tilde2");
    t.n = n;
    t.estimate = rep.sigma_tilde2;
    t.ci_low = rep.sigma_tilde2 - stats::kZ95 * rep.sigma_tilde2_stderr;
    t.ci_high = rep.sigma_tilde2 + stats::kZ95 * rep.sigma_tilde2_stderr;
    t.samples = rep.samples;
    auto& r = ctx.add("product.ratio");
    r.n = n;
    r.estimate = rep.ratio;
    auto& k = ctx.add("product.ks");
    k.n = n;
    k.estimate = rep.ks;
    k.samples = rep.samples;
  }
}

std::string utc_now() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }
std::string cell(const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : std::string(); }

}  // namespace

RunResult run(const ExperimentConfig& config) {
  validate(config);
  if (config.kernel != "auto") kernels::set_backend(*kernels::parse_backend(config.kernel));
  const auto started = utc_now();
  Context ctx{config, alpha_set(config.schedule), {}};
  RunResult result;
  switch (config.experiment) {
    case ExperimentKind::Simulate: run_simulate(ctx); break;
    case ExperimentKind::Decay: run_decay(ctx); break;
    case ExperimentKind::Ld: run_ld(ctx); break;
    case ExperimentKind::Md: run_md(ctx); break;
    case ExperimentKind::Clt: run_clt(ctx); break;
    case ExperimentKind::Variance: run_variance(ctx); break;
    case ExperimentKind::QuenchedVariance: run_quenched_variance(ctx); break;
    case ExperimentKind::Centering: run_centering(ctx); break;
    case ExperimentKind::Product: run_product(ctx); break;
    case ExperimentKind::Selftest: {
      std::ostringstream table;
      for (const auto& s : run_selftest(config.workers)) {
        table << (s.passed ? "PASS  " : "FAIL  ") << s.name << "  " << s.detail << "\n";
        result.passed = result.passed && s.passed;
        auto& r = ctx.add("selftest." + s.name);
        r.estimate = s.passed ? 1.0 : 0.0;
        r.wall_ms = s.wall_ms;
      }
      result.report = table.str();
      break;
    }
  }
  result.rows = std::move(ctx.rows);
  json timings = json::array();
  for (const auto& r : result.rows) timings.push_back(r.wall_ms);
  result.sidecar = {{"config", config_to_json(config)},
                    {"kernel", std::string(kernels::backend_name(kernels::active_backend()))},
                    {"started_utc", started},
                    {"wall_ms", ms_since(ctx.t0)},
                    {"row_wall_ms", timings},
                    {"rows", result.rows.size()}};
  return result;
}

std::string records_to_csv(const std::vector<Record>& rows, bool timing) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : rows) {
    out += r.experiment + ',' + r.alpha_set + ',' + cell(r.n) + ',' + cell(r.eps_or_t) + ',' + cell(r.tau) + ',' +
           cell(r.p) + ',' + cell(r.estimate) + ',' + cell(r.ci_low) + ',' + cell(r.ci_high) + ',' +
           cell(r.samples) + ',' + std::to_string(r.seed) + ',' +
           (timing ? format_double(std::round(r.wall_ms * 1000.0) / 1000.0) : std::string()) + '\n';
  }
  return out;
}

void write_outputs(const RunResult& result, const ExperimentConfig& config) {
  if (config.out.empty()) return;
  std::ofstream csv(config.out, std::ios::binary);
  if (!csv) throw std::runtime_error("cannot write " + config.out);
  csv << records_to_csv(result.rows, config.timing);
  std::string side = config.out;
  if (side.size() > 4 && side.compare(side.size() - 4, 4, ".csv") == 0) side.resize(side.size() - 4);
  std::ofstream js(side + ".json", std::ios::binary);
  if (!js) throw std::runtime_error("cannot write " + side + ".json");
  js << result.sidecar.dump(2) << "\n";
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config", "cannot open " + path);
  json j = json::parse(is, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config", path + " is not valid JSON");
  return config_from_json(j);
}

}  // namespace lsv::cli
