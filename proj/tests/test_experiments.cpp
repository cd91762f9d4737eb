#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "sdnls/errors.hpp"
#include "sdnls/experiments.hpp"
#include "sdnls/spectral.hpp"

using namespace sdnls;

namespace {

Scenario constant_1d(const std::string& name, ScenarioKind kind) {
  Scenario s;
  s.name = name;
  s.kind = kind;
  s.grid = default_grid(1);
  s.initial.kind = InitialKind::constant;
  return s;
}

Scenario random_1d(const std::string& name, ScenarioKind kind) {
  auto s = constant_1d(name, kind);
  s.initial.kind = InitialKind::random;
  return s;
}

CheckStatus status_of(const ScenarioResult& r, const std::string& id) {
  const auto* c = r.find_check(id);
  REQUIRE_MESSAGE(c, "missing check " << id);
  return c->status;
}

void require_all_pass(const ScenarioResult& r) {
  INFO("scenario " << r.name << (r.error ? " error: " + *r.error : std::string()));
  for (const auto& c : r.checks) {
    INFO(c.id << " " << c.detail << " value=" << c.value.value_or(NAN));
    CHECK(c.status != CheckStatus::fail);
  }
  CHECK(r.passed());
}

class CollectingSink : public ResultSink {
 public:
  void on_scenario(const Scenario& s, const ScenarioResult&) override { names.push_back(s.name); }
  std::vector<std::string> names;
};

}  // namespace

TEST_CASE("initial data") {
  const auto g = default_grid(2).build();
  CHECK(g->size() == 64 * 64);
  CHECK(default_grid(3).points == std::vector<int>{32, 32, 32});

  InitialDataSpec c{.kind = InitialKind::constant, .amplitude = 2.0, .phase = std::numbers::pi / 2};
  const auto f = build_initial(g, c);
  CHECK(std::abs(f[17] - Complex(0.0, 2.0)) < 1e-15);

  InitialDataSpec wave{.kind = InitialKind::single_mode, .amplitude = 0.5, .modes = {1, -2}};
  const auto spec = to_spectral(build_initial(g, wave));
  CHECK(std::abs(spec.coeffs[g->flatten({1, -2, 0})] - Complex(0.5)) < 1e-14);

  InitialDataSpec rnd{.kind = InitialKind::random, .amplitude = 1.5, .seed = 9, .regularity = 2};
  CHECK(build_initial(g, rnd).max_modulus() == doctest::Approx(1.5));
  CHECK(build_initial(g, rnd).values == build_initial(g, rnd).values);

  SUBCASE("file data") {
    const auto line = make_grid(1, {4}, {1.0});
    const std::string path = "initial_test.csv";
    {
      std::ofstream out(path);
      out << "re,im\n1,0\n0,1\n-1,0\n0.5,-0.25\n";
    }
    const auto u = build_initial(line, {.kind = InitialKind::file, .path = path});
    CHECK(u[1] == Complex(0.0, 1.0));
    CHECK(u[3] == Complex(0.5, -0.25));
    CHECK_THROWS(build_initial(make_grid(1, {8}, {1.0}), {.kind = InitialKind::file, .path = path}));
    CHECK_THROWS_AS(build_initial(line, {.kind = InitialKind::file, .path = "missing.csv"}), IoError);
    std::filesystem::remove(path);
  }
}

TEST_CASE("scenario validation") {
  auto s = constant_1d("x", ScenarioKind::run);
  CHECK_NOTHROW(s.validate());
  CHECK(s.resolved_t_max() == doctest::Approx(10.0));
  s.checks = {"no_such_check"};
  CHECK_THROWS_AS(s.validate(), ConfigError);

  auto e = constant_1d("e", ScenarioKind::extinction_1d);
  e.damping.delta = 0.1;
  CHECK_THROWS_AS(e.validate(), ConfigError);
  e = constant_1d("e", ScenarioKind::extinction_23d);
  CHECK_THROWS_AS(e.validate(), ConfigError);

  auto control = constant_1d("c", ScenarioKind::extinction_1d);
  control.damping.gamma = 0.0;
  CHECK_THROWS_AS(control.resolved_t_max(), ConfigError);

  CHECK(scenario_kind_from_string("nash_ensemble") == ScenarioKind::nash_ensemble);
  CHECK_FALSE(scenario_kind_from_string("bogus"));
  for (auto k : {ScenarioKind::run, ScenarioKind::gamma_sweep}) {
    CHECK(scenario_kind_from_string(to_string(k)) == k);
    for (const auto& id : default_checks(k)) {
      CHECK(std::find(known_checks().begin(), known_checks().end(), id) != known_checks().end());
    }
  }
}

TEST_CASE("one-dimensional extinction scenarios") {
  SUBCASE("constant data die at t_c") {
    const auto r = run_scenario(constant_1d("const", ScenarioKind::extinction_1d));
    require_all_pass(r);
    REQUIRE(r.runs.size() == 1);
    REQUIRE(r.runs[0].extinction.t_v);
    CHECK(std::abs(*r.runs[0].extinction.t_v - 1.0) <= 2e-3);
    REQUIRE(r.runs[0].extinction.bound_1d);
    CHECK(*r.runs[0].extinction.bound_1d >= 1.0);
  }

  SUBCASE("random data obey the bound") {
    auto s = random_1d("rand", ScenarioKind::extinction_1d);
    s.damping.alpha = 0.5;
    const auto r = run_scenario(s);
    require_all_pass(r);
    CHECK(status_of(r, "extinction_bound") == CheckStatus::pass);
    CHECK(r.find_check("t_v_matches_tc") == nullptr);
    const auto& ext = r.runs[0].extinction;
    REQUIRE(ext.t_v);
    CHECK(*ext.t_v <= *ext.bound_1d);
    CHECK(ext.nash_constant_estimate > 0.0);
  }

  SUBCASE("undamped control conserves mass") {
    auto s = random_1d("control", ScenarioKind::extinction_1d);
    s.damping.gamma = 0.0;
    s.t_max = 1.0;
    const auto r = run_scenario(s);
    require_all_pass(r);
    CHECK(status_of(r, "no_extinction") == CheckStatus::pass);
    CHECK(status_of(r, "mass_conserved") == CheckStatus::pass);
  }
}

TEST_CASE("constant data in two dimensions") {
  Scenario s;
  s.name = "const2d";
  s.kind = ScenarioKind::extinction_23d;
  s.grid = {2, {16, 16}, {6.283185307179586, 6.283185307179586}};
  const auto r = run_scenario(s);
  require_all_pass(r);
  CHECK(status_of(r, "t_v_matches_tc") == CheckStatus::pass);
  CHECK(status_of(r, "h2_persistence") == CheckStatus::pass);
}

TEST_CASE("H1 data in two dimensions are exploratory") {
  Scenario s;
  s.name = "h1_2d";
  s.kind = ScenarioKind::extinction_23d;
  s.grid = {2, {16, 16}, {6.283185307179586, 6.283185307179586}};
  s.initial = {.kind = InitialKind::random, .regularity = 1};
  const auto r = run_scenario(s);
  CHECK(r.passed());
  for (const auto& c : r.checks) {
    if (c.id != "mass_monotone") CHECK(c.status == CheckStatus::reported);
  }
}

TEST_CASE("gamma sweep") {
  auto s = constant_1d("gammas", ScenarioKind::gamma_sweep);
  s.grid.points = {16};
  s.gammas = {0.5, 1.0, 2.0};
  const auto r = run_scenario(s);
  require_all_pass(r);
  CHECK(r.constants.at("gamma=0.5.t_v") == doctest::Approx(2.0).epsilon(2e-3));
  CHECK(r.constants.at("gamma=2.t_v") == doctest::Approx(0.5).epsilon(4e-3));
}

TEST_CASE("regularized sweep on constant data") {
  auto s = constant_1d("sweep", ScenarioKind::regularized_sweep);
  s.grid.points = {16};
  s.t_max = 5.0;
  s.record_every = 5;
  s.deltas = {1e-1, 1e-2, 1e-3};
  const auto r = run_scenario(s);
  require_all_pass(r);
  CHECK(status_of(r, "slope_scaling") == CheckStatus::pass);

  // the fitted slope of the smallest delta matches the scalar ODE's decay rate
  // in its exponential tail, -2 gamma / sqrt(delta)
  CHECK(r.constants.at("delta=0.001.slope") == doctest::Approx(-2.0 / std::sqrt(1e-3)).epsilon(0.15));

  auto linear = s;
  linear.name = "linear";
  linear.deltas = {10.0};
  linear.t_max = 1.0;
  linear.slope_window_hi = 1.0;
  linear.checks = {"linear_slope", "no_extinction"};
  require_all_pass(run_scenario(linear));

  auto bad = s;
  bad.deltas = {1e-3, 1e-1};
  CHECK_FALSE(run_scenario(bad).passed());
}

TEST_CASE("delta convergence") {
  auto s = constant_1d("dconv", ScenarioKind::delta_convergence);
  s.grid.points = {16};
  s.t_max = 2.0;
  s.deltas = {1e-2, 1e-3, 1e-4};
  const auto r = run_scenario(s);
  require_all_pass(r);
  CHECK(r.constants.at("oracle_gap") < 1e-9);

  auto same = s;
  same.deltas = {1e-2, 1e-2};
  CHECK_FALSE(run_scenario(same).passed());
}

TEST_CASE("NLS corollary") {
  auto s = random_1d("nls", ScenarioKind::nls_corollary);
  s.grid.points = {128};
  s.damping.alpha = 0.5;
  s.couplings = {{1.0, 1.0}, {-1.0, 1.0}};
  const auto r = run_scenario(s);
  require_all_pass(r);
  CHECK(status_of(r, "lambda_zero_reduction") == CheckStatus::pass);
  CHECK(r.find_check("lambda_zero_reduction")->value.value() <= 1e-12);
}

TEST_CASE("Nash ensemble") {
  Scenario s;
  s.name = "nash";
  s.kind = ScenarioKind::nash_ensemble;
  s.ensemble_count = 20;
  const auto r = run_scenario(s);
  require_all_pass(r);
  for (const char* key : {"d=1,s=1,alpha=0.5.max", "d=2,s=2,alpha=1.max"}) {
    CHECK(std::isfinite(r.constants.at(key)));
    CHECK(r.constants.at(key) > 0.0);
  }
}

TEST_CASE("single runs with diagnostics") {
  auto s = random_1d("diag", ScenarioKind::run);
  s.damping.delta = 0.1;
  s.t_max = 1.0;
  s.record_every = 1;
  s.checks = {"mass_monotone", "mass_law", "h1_monotone", "dtu_monotone", "holder", "no_extinction", "gn_ratio"};
  const auto r = run_scenario(s);
  require_all_pass(r);
  CHECK(status_of(r, "mass_law") == CheckStatus::reported);
  CHECK(status_of(r, "gn_ratio") == CheckStatus::reported);
  CHECK(r.checks.size() == s.checks.size());

  auto contraction = random_1d("pair", ScenarioKind::run);
  contraction.t_max = 1.5;
  contraction.record_every = 5;
  contraction.checks = {"contraction"};
  require_all_pass(run_scenario(contraction));
}

TEST_CASE("requested checks always get an outcome") {
  auto s = constant_1d("odd", ScenarioKind::gamma_sweep);
  s.grid.points = {16};
  s.gammas = {1.0};
  s.checks = {"extinct", "nash_stable"};
  const auto r = run_scenario(s);
  REQUIRE(r.find_check("nash_stable"));
  CHECK(status_of(r, "nash_stable") == CheckStatus::fail);
  CHECK_FALSE(r.passed());
}

TEST_CASE("determinism") {
  auto s = random_1d("det", ScenarioKind::run);
  s.t_max = 0.5;
  const auto a = run_scenario(s);
  const auto b = run_scenario(s);
  CHECK(a.runs == b.runs);
  CHECK(a.checks == b.checks);
}

TEST_CASE("suite aggregation") {
  CollectingSink sink;
  const auto empty = run_suite({}, &sink);
  CHECK(empty.entries.empty());
  CHECK(empty.passed());

  auto ok = constant_1d("ok", ScenarioKind::extinction_1d);
  ok.grid.points = {16};
  auto broken = constant_1d("broken", ScenarioKind::run);
  broken.initial = {.kind = InitialKind::file, .path = "does/not/exist.csv"};
  auto third = constant_1d("third", ScenarioKind::gamma_sweep);
  third.grid.points = {16};
  third.gammas = {1.0, 2.0};

  const auto suite = run_suite({ok, broken, third}, &sink, 2);
  REQUIRE(suite.entries.size() == 3);
  CHECK_FALSE(suite.passed());
  CHECK(suite.entries[0].name == "ok");
  CHECK(suite.entries[0].passed());
  CHECK(suite.entries[1].error);
  CHECK_FALSE(suite.entries[1].passed());
  CHECK(suite.entries[2].passed());
  CHECK(sink.names.size() == 3);
  CHECK(suite.count(CheckStatus::fail) == 1);

  CHECK_THROWS_AS(run_suite({ok, ok}, nullptr), ConfigError);

  // three extinction scenarios give three reports
  auto a = constant_1d("a", ScenarioKind::extinction_1d);
  auto b = random_1d("b", ScenarioKind::extinction_1d);
  Scenario c;
  c.name = "c";
  c.kind = ScenarioKind::extinction_23d;
  c.grid = {2, {16, 16}, {6.283185307179586, 6.283185307179586}};
  const auto three = run_suite({a, b, c}, nullptr, 3);
  CHECK(three.entries.size() == 3);
  CHECK(three.passed());
}
