#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sdnls/cli.hpp"
#include "sdnls/report.hpp"

using namespace sdnls;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "sdnls");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

const fs::path kWork = "cli_test_work";

}  // namespace

TEST_CASE("ode-oracle prints closed-form values") {
  auto r = run_cli({"ode-oracle", "--y0", "1", "--alpha", "1", "--gamma", "1", "--t", "0.5"});
  CHECK(r.code == 0);
  CHECK(r.out == "0.25\n");

  r = run_cli({"ode-oracle", "--y0", "1", "--alpha", "1", "--gamma", "1", "--tc"});
  CHECK(r.out == "1\n");
  r = run_cli({"ode-oracle", "--y0", "4", "--alpha", "0.5", "--gamma", "2", "--tc"});
  CHECK(std::stod(r.out) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

  r = run_cli({"ode-oracle", "--y0", "1", "--alpha", "1", "--gamma", "1", "--delta", "100", "--t", "0.1"});
  CHECK(r.code == 0);
  CHECK(std::stod(r.out) == doctest::Approx(ode_oracle_regularized(1, 1, 1, 100, 0.1)).epsilon(1e-15));

  CHECK(run_cli({"ode-oracle", "--y0", "1", "--alpha", "1.5", "--gamma", "1"}).code != 0);
  CHECK(run_cli({"ode-oracle", "--y0", "1", "--alpha", "0", "--gamma", "1"}).code == 2);
}

TEST_CASE("usage errors") {
  CHECK(run_cli({}).code != 0);
  CHECK(run_cli({"teleport"}).code != 0);
  CHECK(run_cli({"run"}).code != 0);
  const auto help = run_cli({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("nash-bench") != std::string::npos);
}

TEST_CASE("run and suite") {
  fs::remove_all(kWork);
  fs::create_directories(kWork);

  const auto missing = run_cli({"run", "--config", (kWork / "missing.cfg").string()});
  CHECK(missing.code == 2);
  CHECK(missing.err.find("missing.cfg") != std::string::npos);

  write(kWork / "bad.cfg", "[damping]\nalpha = 1.5\n");
  const auto bad = run_cli({"run", "--config", (kWork / "bad.cfg").string()});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("line 2") != std::string::npos);

  write(kWork / "one.cfg",
        "[scenario]\nname = const\nkind = extinction_1d\n[grid]\npoints = 32\n[initial]\nkind = constant\n");
  const auto out_dir = (kWork / "one").string();
  const auto ok = run_cli({"run", "--config", (kWork / "one.cfg").string(), "--out", out_dir});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("PASS const") != std::string::npos);
  REQUIRE(fs::exists(fs::path(out_dir) / "report.json"));
  REQUIRE(fs::exists(fs::path(out_dir) / "const" / "run.csv"));

  const auto report = read_report_json((fs::path(out_dir) / "report.json").string());
  CHECK(report.passed);
  CHECK(report.suite.entries.size() == 1);
  // CSV on disk matches the series in the report
  CHECK(read_timeseries_csv((fs::path(out_dir) / "const" / "run.csv").string()) ==
        report.suite.entries[0].runs[0].series);

  SUBCASE("re-running the embedded config reproduces the verdicts") {
    write(kWork / "echo.cfg", report.config_text);
    const auto again_dir = (kWork / "again").string();
    CHECK(run_cli({"run", "--config", (kWork / "echo.cfg").string(), "--out", again_dir}).code == 0);
    const auto again = read_report_json((fs::path(again_dir) / "report.json").string());
    CHECK(again.verdicts == report.verdicts);
    CHECK(again.suite.entries[0].runs == report.suite.entries[0].runs);
    // byte-identical CSV output
    std::ifstream a(fs::path(out_dir) / "const" / "run.csv"), b(fs::path(again_dir) / "const" / "run.csv");
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    CHECK(sa.str() == sb.str());
  }

  SUBCASE("failing checks give exit 1") {
    write(kWork / "fail.cfg",
          "[scenario]\nname = wrong\nkind = extinction_1d\n[grid]\npoints = 16\n"
          "[initial]\nkind = constant\n[run]\nt_max = 0.5\n");
    const auto r = run_cli({"run", "--config", (kWork / "fail.cfg").string(), "--out", (kWork / "fail").string()});
    CHECK(r.code == 1);
    CHECK(r.out.find("FAIL wrong") != std::string::npos);
  }

  SUBCASE("run refuses multi-scenario files") {
    write(kWork / "two.cfg", "[scenario]\nname = a\n[scenario]\nname = b\n");
    CHECK(run_cli({"run", "--config", (kWork / "two.cfg").string()}).code == 2);
    const auto s = run_cli({"suite", "--config", (kWork / "two.cfg").string(), "--out", (kWork / "two").string(),
                            "--threads", "2", "-v", "0"});
    CHECK(s.code == 0);
    CHECK(s.out.find("PASS a") != std::string::npos);
    CHECK(s.out.find("PASS b") != std::string::npos);
  }

  SUBCASE("duplicate names are rejected") {
    write(kWork / "dup.cfg", "[scenario]\nname = a\n[scenario]\nname = a\n");
    CHECK(run_cli({"suite", "--config", (kWork / "dup.cfg").string()}).code == 2);
  }
  fs::remove_all(kWork);
}

TEST_CASE("sweep") {
  fs::remove_all(kWork);
  fs::create_directories(kWork);
  write(kWork / "base.cfg", "[grid]\npoints = 16\n[initial]\nkind = constant\n[run]\nt_max = 5\nrecord_every = 5\n");
  const auto r = run_cli({"sweep", "--config", (kWork / "base.cfg").string(), "--param", "delta",
                          "--values", "1e-1,1e-2,1e-3", "--out", (kWork / "sweep").string(), "-v", "2"});
  CHECK(r.code == 0);
  CHECK(r.out.find("slope_scaling") != std::string::npos);
  CHECK(fs::exists(kWork / "sweep" / "scenario" / "delta=0.001.csv"));

  const auto g = run_cli({"sweep", "--config", (kWork / "base.cfg").string(), "--param", "gamma",
                          "--values", "0.5,1,2", "--out", (kWork / "gamma").string()});
  CHECK(g.code == 0);
  CHECK(g.out.find("gamma_scaling") != std::string::npos);

  CHECK(run_cli({"sweep", "--config", (kWork / "base.cfg").string(), "--param", "beta", "--values", "1"}).code != 0);
  CHECK(run_cli({"sweep", "--config", (kWork / "base.cfg").string(), "--param", "delta", "--values", "x"}).code == 2);
  fs::remove_all(kWork);
}

TEST_CASE("nash-bench") {
  const auto dir = (kWork / "nash").string();
  const auto r = run_cli({"nash-bench", "--count", "10", "--alphas", "0.5,1", "--orders", "1", "--dims", "1",
                          "--out", dir, "-v", "2"});
  CHECK(r.code == 0);
  CHECK(r.out.find("d=1,s=1,alpha=0.5.max") != std::string::npos);
  CHECK(fs::exists(fs::path(dir) / "report.json"));
  CHECK(run_cli({"nash-bench", "--count", "3"}).code != 0);
  fs::remove_all(kWork);
}
