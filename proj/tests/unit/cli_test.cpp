#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lsv/cli/config.hpp"
#include "lsv/cli/runner.hpp"
#include "lsv/errors.hpp"

namespace lsv::cli {
namespace {

ExperimentConfig small_ld() {
  ExperimentConfig c;
  c.experiment = ExperimentKind::Ld;
  c.schedule = "bernoulli(0.2:0.5,0.5:0.5)";
  c.n = {50, 100};
  c.eps = {0.05};
  c.samples = 3000;
  c.grid_n = 512;
  c.seed = 17;
  c.workers = 1;
  return c;
}

std::string field_of(const ExperimentConfig& c) {
  try {
    validate(c);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

TEST(Config, AlphaOutsideRangeNamesField) {
  auto c = small_ld();
  c.schedule = "const(1.0)";
  EXPECT_EQ(field_of(c), "schedule");
  c.schedule = "bernoulli(0.2:0.5,0:0.5)";
  EXPECT_EQ(field_of(c), "schedule");
  EXPECT_THROW(run(c), ConfigError);
}

TEST(Config, OtherInvalidFields) {
  auto c = small_ld();
  c.samples = 999;
  EXPECT_EQ(field_of(c), "samples");
  c = small_ld();
  c.tau = 0.5;
  EXPECT_EQ(field_of(c), "tau");
  c = small_ld();
  c.grid_n = 32;
  EXPECT_EQ(field_of(c), "grid_n");
  c = small_ld();
  c.p = {0.5};
  EXPECT_EQ(field_of(c), "p");
  c = small_ld();
  c.observable = "sine";
  EXPECT_EQ(field_of(c), "observable");
  EXPECT_THROW(config_from_json(nlohmann::json{{"experiment", "ld"}, {"bogus", 1}}), ConfigError);
  EXPECT_THROW(config_from_json(nlohmann::json{{"experiment", "nope"}}), ConfigError);
}

TEST(Config, OverridesAndRoundTrip) {
  auto c = small_ld();
  apply_override(c, "eps=[0.1,0.2]");
  apply_override(c, "schedule=const(0.3)");
  apply_override(c, "n={\"geometric\":[8,64,4]}");
  EXPECT_EQ(c.eps, (std::vector<double>{0.1, 0.2}));
  EXPECT_EQ(c.schedule, "const(0.3)");
  EXPECT_EQ(c.n, (std::vector<std::size_t>{8, 16, 32, 64}));
  EXPECT_THROW(apply_override(c, "noequals"), ConfigError);
  auto back = config_from_json(config_to_json(c));
  EXPECT_EQ(config_to_json(back), config_to_json(c));
}

TEST(Config, ShippedConfigsParseAndValidate) {
  std::size_t count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(LSV_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    SCOPED_TRACE(entry.path().string());
    auto c = load_config(entry.path().string());
    EXPECT_NO_THROW(validate(c));
    ++count;
  }
  EXPECT_GE(count, 10u);
  EXPECT_THROW(load_config(std::string(LSV_CONFIG_DIR) + "/missing.json"), ConfigError);
}

TEST(Run, LdAboveTwiceSupIsZero) {
  auto c = small_ld();
  c.eps = {2.5};
  auto r = run(c);
  ASSERT_FALSE(r.rows.empty());
  std::size_t seen = 0;
  for (const auto& row : r.rows) {
    if (row.experiment != "ld") continue;
    ++seen;
    EXPECT_EQ(*row.estimate, 0.0);
    EXPECT_EQ(*row.ci_low, 0.0);
    EXPECT_EQ(*row.samples, 3000u);
  }
  EXPECT_EQ(seen, 2u);
}

TEST(Run, CsvShapeAndReproducibility) {
  auto c = small_ld();
  auto a = records_to_csv(run(c).rows, false);
  c.workers = 3;
  auto b = records_to_csv(run(c).rows, false);
  EXPECT_EQ(a, b);
  std::istringstream in(a);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, kCsvHeader);
  while (std::getline(in, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 11) << line;
    EXPECT_EQ(line.back(), ',') << "wall_ms must stay blank without timing";
  }
  c.seed = 18;
  EXPECT_NE(records_to_csv(run(c).rows, false), a);
}

TEST(Run, OutputsAndSidecar) {
  auto dir = std::filesystem::temp_directory_path() / "lsv_cli_test";
  std::filesystem::create_directories(dir);
  auto c = small_ld();
  c.out = (dir / "ld.csv").string();
  auto r = run(c);
  write_outputs(r, c);
  std::ifstream csv(c.out), js((dir / "ld.json").string());
  ASSERT_TRUE(csv.good());
  ASSERT_TRUE(js.good());
  std::stringstream body;
  body << csv.rdbuf();
  EXPECT_EQ(body.str(), records_to_csv(r.rows, false));
  auto side = nlohmann::json::parse(js);
  EXPECT_EQ(side.at("config").at("seed"), 17);
  EXPECT_EQ(config_from_json(side.at("config")).schedule, c.schedule);
  std::filesystem::remove_all(dir);
}

TEST(Run, SelftestPasses) {
  ExperimentConfig c;
  c.experiment = ExperimentKind::Selftest;
  c.workers = 2;
  auto r = run(c);
  EXPECT_TRUE(r.passed) << r.report;
  EXPECT_FALSE(r.report.empty());
}

TEST(Parse, Literals) {
  EXPECT_EQ(alpha_set("bernoulli(0.2:0.5,0.25:0.5)"), alpha_set("bernoulli(0.2:0.5,0.25:0.5;seed=3)"));
  EXPECT_EQ(parse_space("const(0.4)").size(), 1u);
  EXPECT_EQ(parse_space("bernoulli(0.2:0.3,0.4:0.7)").size(), 2u);
  EXPECT_THROW(parse_space("bernoulli(0.2:0.3,0.4:0.3)"), ConfigError);
  auto s = parse_schedule("list(0.1,0.2)", 1);
  EXPECT_DOUBLE_EQ(s.symbol_at(1).alpha(), 0.1);
  EXPECT_DOUBLE_EQ(parse_observable("poly(1,2)")(0.5), 2.0);
  EXPECT_DOUBLE_EQ(parse_observable("const(3)")(0.9), 3.0);
}

}  // namespace
}  // namespace lsv::cli
