#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "sdnls/errors.hpp"
#include "sdnls/report.hpp"

using namespace sdnls;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Compares against tests/golden/<name>; SDNLS_UPDATE_GOLDEN=1 rewrites it.
void check_golden(const std::string& name, const std::string& actual) {
  const fs::path path = fs::path(SDNLS_GOLDEN_DIR) / name;
  if (std::getenv("SDNLS_UPDATE_GOLDEN")) {
    std::ofstream(path, std::ios::binary) << actual;
  }
  REQUIRE_MESSAGE(fs::exists(path), "missing golden file " << path);
  CHECK(slurp(path) == actual);
}

TimeSeries sample_series() {
  TimeSeries s;
  s.push_back({0.0, 6.283185307179586, 6.283185307179586, 6.283185307179586, 6.283185307179586, 1.0, 0.0, {}, {}});
  s.push_back({1e-3, 6.270628, 6.2769, 6.270628, 6.270628, 0.999, 3.5e-9, 2.0e-3, {}});
  s.push_back({2e-3, 6.258, 6.26, 6.258, 6.258, 0.998, 1.25e-17, {}, -0.5});
  return s;
}

ReportDocument sample_report() {
  Scenario sc;
  sc.name = "golden";
  sc.kind = ScenarioKind::extinction_1d;
  sc.grid = {1, {16}, {6.283185307179586}};
  RunConfig cfg;
  cfg.output_dir = "out";
  cfg.scenarios = {sc};

  ScenarioResult r;
  r.name = "golden";
  r.kind = ScenarioKind::extinction_1d;
  RunRecord run;
  run.label = "run";
  run.series = sample_series();
  run.steps = 1000;
  run.t_final = 1.0;
  run.extinction = {true, 1.0, 0.0, 2.0, {}, 0.15915494309189535};
  r.runs = {run};
  r.checks = {{"extinct", CheckStatus::pass, 1.0, {}, "every run reached extinction before t_max"},
              {"mass_law", CheckStatus::reported, 1.5e-7, {}, "max mass-law residual before extinction"},
              {"extinction_bound", CheckStatus::pass, 1.0, 0.0, "smallest (bound - t_v) over runs"}};
  r.constants = {{"run.t_v", 1.0}, {"run.bound", 2.0}};
  r.wall_seconds = 0.25;

  SuiteResult suite;
  suite.entries = {r};
  auto doc = make_report(cfg, suite);
  doc.environment = {"binary64", "linux", "gcc 11.4.0"};
  return doc;
}

}  // namespace

TEST_CASE("CSV layout") {
  const std::string header = "t,mass_sq,l2ma_pow,h1,h2,linf,mass_law_residual,dtu_l2,nls_energy\n";
  CHECK(timeseries_csv({}) == header);

  TimeSeries one{{.t = 0.5, .mass_sq = 1.0}};
  const auto text = timeseries_csv(one);
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
  CHECK(text == header + "5.00000000000000000e-01,1.00000000000000000e+00,0.00000000000000000e+00,"
                         "0.00000000000000000e+00,0.00000000000000000e+00,0.00000000000000000e+00,"
                         "0.00000000000000000e+00,,\n");
}

TEST_CASE("CSV golden and round trip") {
  const auto series = sample_series();
  const auto text = timeseries_csv(series);
  check_golden("timeseries.csv", text);
  CHECK(parse_timeseries_csv(text) == series);
  CHECK(timeseries_csv(series) == text);

  const std::string path = "report_test_series.csv";
  write_timeseries_csv(series, path);
  CHECK(read_timeseries_csv(path) == series);
  CHECK(slurp(path) == text);
  fs::remove(path);

  // awkward doubles survive exactly
  TimeSeries awkward{{.t = 0.1 + 0.2, .mass_sq = std::numeric_limits<double>::denorm_min(),
                      .l2ma_pow = 1.0 / 3.0, .h1 = 1e300, .dtu_l2 = std::nextafter(1.0, 2.0)}};
  CHECK(parse_timeseries_csv(timeseries_csv(awkward)) == awkward);
}

TEST_CASE("CSV errors") {
  CHECK_THROWS_AS(parse_timeseries_csv("a,b\n"), IoError);
  CHECK_THROWS_AS(parse_timeseries_csv(timeseries_csv({}) + "1,2,3\n"), IoError);
  CHECK_THROWS_AS(read_timeseries_csv("no/such/file.csv"), IoError);
  // parent directories are created, but a directory path is not writable
  fs::create_directories("csv_dir_target");
  CHECK_THROWS_AS(write_timeseries_csv({}, "csv_dir_target"), IoError);
  fs::remove_all("csv_dir_target");
}

TEST_CASE("JSON golden and round trip") {
  const auto doc = sample_report();
  CHECK(doc.verdicts.pass == 2);
  CHECK(doc.verdicts.reported == 1);
  CHECK(doc.verdicts.fail == 0);
  CHECK(doc.passed);
  CHECK(doc.schema_version == kReportSchemaVersion);

  const auto text = report_json_text(doc);
  check_golden("report.json", text);
  CHECK(report_from_json(nlohmann::ordered_json::parse(text)) == doc);

  const std::string path = "report_test.json";
  write_report_json(doc, path);
  CHECK(read_report_json(path) == doc);
  CHECK(slurp(path) == text);
  fs::remove(path);

  // the embedded config reproduces the scenario list
  const auto echoed = parse_config(doc.config_text);
  REQUIRE(echoed.scenarios.size() == 1);
  CHECK(echoed.scenarios[0].name == "golden");
  CHECK(echoed.output_dir == "out");
}

TEST_CASE("empty suite and special values") {
  auto doc = make_report({}, {});
  CHECK(doc.passed);
  const auto j = to_json(doc);
  CHECK(j.at("scenarios").empty());
  CHECK(j.begin().key() == "schema_version");
  CHECK(report_from_json(j) == doc);

  SuiteResult suite;
  ScenarioResult r;
  r.name = "odd";
  r.error = "boom";
  r.checks = {{"scenario_error", CheckStatus::fail, {}, {}, "boom"}};
  r.constants = {{"inf", std::numeric_limits<double>::infinity()}, {"ninf", -std::numeric_limits<double>::infinity()}};
  suite.entries = {r};
  doc = make_report({}, suite);
  CHECK_FALSE(doc.passed);
  CHECK(doc.verdicts.fail == 1);
  const auto back = report_from_json(nlohmann::ordered_json::parse(report_json_text(doc)));
  CHECK(back == doc);

  r.constants = {{"nan", std::nan("")}};
  suite.entries = {r};
  const auto nan_back = report_from_json(to_json(make_report({}, suite)));
  CHECK(std::isnan(nan_back.suite.entries[0].constants.at("nan")));
}

TEST_CASE("JSON errors") {
  auto j = to_json(sample_report());
  j["schema_version"] = 99;
  CHECK_THROWS_AS(report_from_json(j), IoError);
  CHECK_THROWS_AS(read_report_json("no/such/report.json"), IoError);
  std::ofstream("broken.json") << "{ not json";
  CHECK_THROWS_AS(read_report_json("broken.json"), IoError);
  fs::remove("broken.json");
}

TEST_CASE("CSV sink writes one file per run") {
  const fs::path dir = "sink_test_out";
  fs::remove_all(dir);
  CsvDirectorySink sink(dir.string());
  const auto doc = sample_report();
  Scenario sc;
  sc.name = "golden";
  sink.on_scenario(sc, doc.suite.entries[0]);
  const auto file = dir / "golden" / "run.csv";
  REQUIRE(fs::exists(file));
  CHECK(slurp(file) == timeseries_csv(sample_series()));
  fs::remove_all(dir);
}
