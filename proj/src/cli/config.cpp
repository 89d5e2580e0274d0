#include "lsv/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "lsv/errors.hpp"
#include "lsv/format.hpp"

namespace lsv::cli {

using nlohmann::json;

namespace {

const std::map<std::string, ExperimentKind>& experiment_table() {
  static const std::map<std::string, ExperimentKind> t = {
      {"simulate", ExperimentKind::Simulate},
      {"decay", ExperimentKind::Decay},
      {"ld", ExperimentKind::Ld},
      {"md", ExperimentKind::Md},
      {"clt", ExperimentKind::Clt},
      {"variance", ExperimentKind::Variance},
      {"quenched-variance", ExperimentKind::QuenchedVariance},
      {"centering", ExperimentKind::Centering},
      {"product", ExperimentKind::Product},
      {"selftest", ExperimentKind::Selftest},
  };
  return t;
}

std::string trim(std::string s) {
  auto sp = [](unsigned char c) { return std::isspace(c); };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), sp));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), sp).base(), s.end());
  return s;
}

// Splits on `sep` at parenthesis depth zero.
std::vector<std::string> split_top(const std::string& s, char sep) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char ch : s) {
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (ch == sep && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(trim(cur));
  return out;
}

struct Call {
  std::string name;
  std::vector<std::string> args;
  bool has_parens = false;
};

Call parse_call(const std::string& field, const std::string& text) {
  std::string s = trim(text);
  Call c;
  auto open = s.find('(');
  if (open == std::string::npos) {
    c.name = s;
    return c;
  }
  if (s.back() != ')') throw ConfigError(field, "unbalanced parentheses in '" + s + "'");
  c.name = trim(s.substr(0, open));
  c.has_parens = true;
  std::string inner = s.substr(open + 1, s.size() - open - 2);
  if (!trim(inner).empty()) c.args = split_top(inner, ',');
  return c;
}

double to_number(const std::string& field, const std::string& s) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(field, "'" + s + "' is not a number");
  }
}

MapParam to_map(const std::string& field, const std::string& s) {
  double a = to_number(field, s);
  if (!(a > 0.0 && a < 1.0)) throw ConfigError(field, "alpha=" + s + " must lie in (0,1)");
  return MapParam(a);
}

std::vector<std::size_t> parse_n(const json& j) {
  std::vector<std::size_t> out;
  auto positive = [](const json& v) {
    if (!v.is_number_integer() || v.get<long long>() <= 0) throw ConfigError("n", "entries must be positive integers");
    return static_cast<std::size_t>(v.get<long long>());
  };
  if (j.is_number()) return {positive(j)};
  if (j.is_array()) {
    for (const auto& v : j) out.push_back(positive(v));
  } else if (j.is_object() && j.contains("geometric")) {
    const auto& g = j["geometric"];
    if (!g.is_array() || g.size() != 3) throw ConfigError("n", "geometric needs [from, to, count]");
    double lo = static_cast<double>(positive(g[0])), hi = static_cast<double>(positive(g[1]));
    std::size_t cnt = positive(g[2]);
    for (std::size_t i = 0; i < cnt; ++i) {
      double f = cnt == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(cnt - 1);
      out.push_back(static_cast<std::size_t>(std::llround(lo * std::pow(hi / lo, f))));
    }
  } else if (j.is_object() && j.contains("linear")) {
    const auto& g = j["linear"];
    if (!g.is_array() || g.size() != 3) throw ConfigError("n", "linear needs [from, to, step]");
    std::size_t lo = positive(g[0]), hi = positive(g[1]), step = positive(g[2]);
    for (std::size_t v = lo; v <= hi; v += step) out.push_back(v);
  } else {
    throw ConfigError("n", "expected an integer, a list, or {geometric|linear: [...]}");
  }
  if (out.empty()) throw ConfigError("n", "no values");
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> parse_reals(const std::string& field, const json& j) {
  std::vector<double> out;
  if (j.is_number()) return {j.get<double>()};
  if (!j.is_array()) throw ConfigError(field, "expected a number or a list of numbers");
  for (const auto& v : j) {
    if (!v.is_number()) throw ConfigError(field, "expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

template <class T>
T get_as(const json& j, const std::string& field) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(field, "wrong type");
  }
}

std::size_t get_count(const json& j, const std::string& field) {
  if (!j.is_number_integer() || j.get<long long>() < 0) throw ConfigError(field, "expected a non-negative integer");
  return static_cast<std::size_t>(j.get<long long>());
}

}  // namespace

std::string experiment_name(ExperimentKind k) {
  for (const auto& [name, kind] : experiment_table()) {
    if (kind == k) return name;
  }
  return "unknown";
}

std::optional<ExperimentKind> parse_experiment(const std::string& s) {
  auto it = experiment_table().find(s);
  if (it == experiment_table().end()) return std::nullopt;
  return it->second;
}

ExperimentConfig config_from_json(const json& j, ExperimentConfig c) {
  if (!j.is_object()) throw ConfigError("<root>", "config must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (key == "experiment") {
      auto e = parse_experiment(get_as<std::string>(v, key));
      if (!e) throw ConfigError(key, "unknown experiment '" + v.dump() + "'");
      c.experiment = *e;
    } else if (key == "schedule") {
      c.schedule = get_as<std::string>(v, key);
    } else if (key == "observable") {
      c.observable = get_as<std::string>(v, key);
    } else if (key == "measure") {
      c.measure = get_as<std::string>(v, key);
    } else if (key == "density") {
      c.density = get_as<std::string>(v, key);
    } else if (key == "centered") {
      c.centered = get_as<bool>(v, key);
    } else if (key == "n") {
      c.n = parse_n(v);
    } else if (key == "eps") {
      c.eps = parse_reals(key, v);
    } else if (key == "t") {
      c.t = parse_reals(key, v);
    } else if (key == "tau") {
      c.tau = get_as<double>(v, key);
    } else if (key == "p") {
      c.p = parse_reals(key, v);
    } else if (key == "samples") {
      c.samples = get_count(v, key);
    } else if (key == "seed") {
      if (!v.is_number_unsigned()) throw ConfigError(key, "expected a non-negative integer");
      c.seed = v.get<std::uint64_t>();
    } else if (key == "grid_n") {
      c.grid_n = get_count(v, key);
    } else if (key == "cone_a") {
      c.cone_a = get_as<double>(v, key);
    } else if (key == "K") {
      c.K = get_count(v, key);
    } else if (key == "draws") {
      c.draws = get_count(v, key);
    } else if (key == "clt_n") {
      c.clt_n = get_count(v, key);
    } else if (key == "stationary_tol") {
      c.stationary_tol = get_as<double>(v, key);
    } else if (key == "normalization") {
      c.normalization = get_as<std::string>(v, key);
    } else if (key == "mode") {
      c.mode = get_as<std::string>(v, key);
    } else if (key == "sigma2") {
      c.sigma2 = v.is_null() ? std::nullopt : std::optional<double>(get_as<double>(v, key));
    } else if (key == "x0") {
      c.x0 = get_as<double>(v, key);
    } else if (key == "workers") {
      c.workers = static_cast<unsigned>(get_count(v, key));
    } else if (key == "kernel") {
      c.kernel = get_as<std::string>(v, key);
    } else if (key == "timing") {
      c.timing = get_as<bool>(v, key);
    } else if (key == "out") {
      c.out = get_as<std::string>(v, key);
    } else if (key == "description") {
      // free text, ignored
    } else {
      throw ConfigError(key, "unknown field");
    }
  }
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["experiment"] = experiment_name(c.experiment);
  j["schedule"] = c.schedule;
  j["observable"] = c.observable;
  j["measure"] = c.measure;
  j["density"] = c.density;
  j["centered"] = c.centered;
  j["n"] = c.n;
  j["eps"] = c.eps;
  j["t"] = c.t;
  j["tau"] = c.tau;
  j["p"] = c.p;
  j["samples"] = c.samples;
  j["seed"] = c.seed;
  j["grid_n"] = c.grid_n;
  j["cone_a"] = c.cone_a;
  j["K"] = c.K;
  j["draws"] = c.draws;
  j["clt_n"] = c.clt_n;
  j["stationary_tol"] = c.stationary_tol;
  j["normalization"] = c.normalization;
  j["mode"] = c.mode;
  j["sigma2"] = c.sigma2 ? json(*c.sigma2) : json(nullptr);
  j["x0"] = c.x0;
  j["workers"] = c.workers;
  j["kernel"] = c.kernel;
  j["timing"] = c.timing;
  j["out"] = c.out;
  return j;
}

void apply_override(ExperimentConfig& c, const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError(assignment, "override must look like key=value");
  std::string key = trim(assignment.substr(0, eq));
  std::string raw = trim(assignment.substr(eq + 1));
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  c = config_from_json(json{{key, value}}, c);
}

Schedule parse_schedule(const std::string& text, std::uint64_t default_seed) {
  const std::string field = "schedule";
  Call call = parse_call(field, text);
  if (call.name == "const") {
    if (call.args.size() != 1) throw ConfigError(field, "const takes one alpha");
    return Schedule::constant(to_map(field, call.args[0]));
  }
  if (call.name == "list") {
    if (call.args.empty()) throw ConfigError(field, "list needs at least one alpha");
    std::vector<MapParam> maps;
    for (const auto& a : call.args) maps.push_back(to_map(field, a));
    return Schedule::fixed_list(std::move(maps));
  }
  if (call.name == "bernoulli") {
    std::string inner = trim(text);
    inner = inner.substr(inner.find('(') + 1);
    inner.pop_back();
    auto parts = split_top(inner, ';');
    std::uint64_t seed = default_seed, stream = 0;
    for (std::size_t i = 1; i < parts.size(); ++i) {
      auto eq = parts[i].find('=');
      if (eq == std::string::npos) throw ConfigError(field, "expected key=value in '" + parts[i] + "'");
      std::string k = trim(parts[i].substr(0, eq));
      double v = to_number(field, trim(parts[i].substr(eq + 1)));
      if (!(v >= 0.0) || v != std::floor(v)) throw ConfigError(field, k + " must be a non-negative integer");
      if (k == "seed") {
        seed = static_cast<std::uint64_t>(v);
      } else if (k == "stream") {
        stream = static_cast<std::uint64_t>(v);
      } else {
        throw ConfigError(field, "unknown bernoulli option '" + k + "'");
      }
    }
    return Schedule::bernoulli(parse_space("bernoulli(" + parts[0] + ")"), seed, stream);
  }
  throw ConfigError(field, "unknown schedule kind '" + call.name + "'");
}

ParameterSpace parse_space(const std::string& text) {
  const std::string field = "schedule";
  Call call = parse_call(field, text);
  if (call.name == "const") {
    if (call.args.size() != 1) throw ConfigError(field, "const takes one alpha");
    return ParameterSpace::single(to_map(field, call.args[0]).alpha());
  }
  if (call.name != "bernoulli") throw ConfigError(field, "expected const(a) or bernoulli(a:p,...)");
  std::string inner = trim(text);
  inner = inner.substr(inner.find('(') + 1);
  inner.pop_back();
  auto parts = split_top(inner, ';');
  std::vector<double> alphas, probs;
  for (const auto& item : split_top(parts[0], ',')) {
    auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError(field, "expected alpha:prob in '" + item + "'");
    alphas.push_back(to_map(field, trim(item.substr(0, colon))).alpha());
    probs.push_back(to_number(field, trim(item.substr(colon + 1))));
  }
  try {
    return ParameterSpace(alphas, probs);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(field, e.what());
  }
}

Observable parse_observable(const std::string& text) {
  const std::string field = "observable";
  Call call = parse_call(field, text);
  auto nums = [&] {
    std::vector<double> v;
    for (const auto& a : call.args) v.push_back(to_number(field, a));
    return v;
  };
  if (call.name == "identity" && call.args.empty()) return Observable::identity();
  if (call.name == "cosine") {
    auto v = nums();
    if (v.empty()) return Observable::cosine();
    if (v.size() != 2) throw ConfigError(field, "cosine takes (amplitude, cycles)");
    return Observable::cosine(v[0], v[1]);
  }
  if (call.name == "indicator-smoothed" && call.args.empty()) return Observable::smoothed_indicator(0.25, 0.75, 0.05);
  if (call.name == "indicator") {
    auto v = nums();
    if (v.size() != 3) throw ConfigError(field, "indicator takes (a, b, width)");
    try {
      return Observable::smoothed_indicator(v[0], v[1], v[2]);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(field, e.what());
    }
  }
  if (call.name == "poly") {
    auto v = nums();
    if (v.empty()) throw ConfigError(field, "poly needs coefficients");
    return Observable::polynomial(v);
  }
  if (call.name == "const") {
    auto v = nums();
    if (v.size() != 1) throw ConfigError(field, "const takes one value");
    return Observable::constant(v[0]);
  }
  if (call.name == "coboundary") {
    if (call.args.size() != 2) throw ConfigError(field, "coboundary takes (observable, beta)");
    return Observable::coboundary(parse_observable(call.args[0]), to_map(field, call.args[1]));
  }
  throw ConfigError(field, "unknown observable '" + text + "'");
}

std::string alpha_set(const std::string& schedule) {
  Schedule s = parse_schedule(schedule, 0);
  std::vector<double> a;
  if (s.kind() == Schedule::Kind::Bernoulli) {
    for (auto p : s.space()->omegas()) a.push_back(p.alpha());
  } else if (s.kind() == Schedule::Kind::Constant) {
    a.push_back(s.symbol_at(1).alpha());
  } else {
    for (std::size_t k = 1; k <= *s.length(); ++k) a.push_back(s.symbol_at(k).alpha());
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
  std::string out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) out += ';';
    out += format_double(a[i]);
  }
  return out;
}

void validate(const ExperimentConfig& c) {
  parse_schedule(c.schedule, c.seed);
  parse_observable(c.observable);
  if (c.measure != "lebesgue" && c.measure != "tilde" && c.measure != "stationary") {
    throw ConfigError("measure", "expected lebesgue, tilde or stationary");
  }
  if (c.n.empty()) throw ConfigError("n", "no values");
  if (c.samples == 0) throw ConfigError("samples", "must be positive");
  if (c.grid_n < Mesh::kMinNodes) throw ConfigError("grid_n", "must be at least " + std::to_string(Mesh::kMinNodes));
  if (!(c.cone_a > 1.0)) throw ConfigError("cone_a", "must exceed 1");
  for (double e : c.eps) {
    if (!(e > 0.0)) throw ConfigError("eps", "must be positive");
  }
  for (double t : c.t) {
    if (!(t > 0.0)) throw ConfigError("t", "must be positive");
  }
  for (double p : c.p) {
    if (!(p >= 1.0)) throw ConfigError("p", "moment order must be at least 1");
  }
  if ((c.experiment == ExperimentKind::Ld || c.experiment == ExperimentKind::Md) && c.samples < 1000) {
    throw ConfigError("samples", "deviation estimates need at least 1000 samples");
  }
  if (!(c.tau > 0.5 && c.tau <= 1.0)) throw ConfigError("tau", "must lie in (1/2, 1]");
  if (!(c.stationary_tol > 0.0)) throw ConfigError("stationary_tol", "must be positive");
  if (c.normalization != "self_normed" && c.normalization != "sqrt_n_fixed_sigma") {
    throw ConfigError("normalization", "expected self_normed or sqrt_n_fixed_sigma");
  }
  if (c.normalization == "sqrt_n_fixed_sigma" && c.mode == "quenched" && !c.sigma2) {
    throw ConfigError("sigma2", "fixed-sigma normalization of a quenched run needs sigma2");
  }
  if (c.mode != "quenched" && c.mode != "annealed") throw ConfigError("mode", "expected quenched or annealed");
  if (!(c.x0 >= 0.0 && c.x0 <= 1.0)) throw ConfigError("x0", "must lie in [0,1]");
  if (c.kernel != "auto" && c.kernel != "scalar" && c.kernel != "avx2") {
    throw ConfigError("kernel", "expected auto, scalar or avx2");
  }
  const bool needs_space = c.experiment == ExperimentKind::Variance ||
                           c.experiment == ExperimentKind::QuenchedVariance ||
                           c.experiment == ExperimentKind::Centering || c.experiment == ExperimentKind::Product ||
                           (c.experiment == ExperimentKind::Clt && c.mode == "annealed");
  if (needs_space) parse_space(c.schedule);
  if (c.experiment == ExperimentKind::Centering && parse_space(c.schedule).size() < 2) {
    throw ConfigError("schedule", "centering needs at least two maps");
  }
  if ((c.experiment == ExperimentKind::Centering || c.experiment == ExperimentKind::QuenchedVariance) &&
      c.draws < 2) {
    throw ConfigError("draws", "need at least two omega draws");
  }
  if (c.experiment == ExperimentKind::Decay) {
    Call call = parse_call("density", c.density);
    if (call.name != "bump" || call.args.size() != 3) throw ConfigError("density", "expected bump(c,gamma,delta)");
    double cc = to_number("density", call.args[0]), g = to_number("density", call.args[1]),
           d = to_number("density", call.args[2]);
    if (!(cc >= 0.0) || !(g >= 0.0 && g < 1.0) || !(d >= 0.0)) {
      throw ConfigError("density", "need c >= 0, 0 <= gamma < 1, delta >= 0");
    }
  }
}

}  // namespace lsv::cli
