#include "sdnls/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "sdnls/analysis.hpp"
#include "sdnls/config.hpp"
#include "sdnls/report.hpp"

namespace sdnls {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void print_summary(const SuiteResult& suite, int verbosity, std::ostream& out) {
  for (const auto& e : suite.entries) {
    out << (e.passed() ? "PASS " : "FAIL ") << e.name << " (" << to_string(e.kind)
        << ", " << num(e.wall_seconds) << " s)\n";
    if (e.error) out << "  error: " << *e.error << "\n";
    if (verbosity < 1) continue;
    for (const auto& c : e.checks) {
      out << "  [" << to_string(c.status) << "] " << c.id;
      if (c.value) out << " value=" << num(*c.value);
      if (c.threshold) out << " threshold=" << num(*c.threshold);
      if (!c.detail.empty()) out << "  # " << c.detail;
      out << "\n";
    }
    if (verbosity < 2) continue;
    for (const auto& [k, v] : e.constants) out << "  " << k << " = " << num(v) << "\n";
  }
}

int execute(RunConfig config, const std::string& out_dir, int threads, int verbosity,
            std::ostream& out) {
  if (!out_dir.empty()) config.output_dir = out_dir;
  if (threads > 0) config.threads = threads;
  if (verbosity >= 0) config.verbosity = verbosity;
  CsvDirectorySink sink(config.output_dir);
  const auto suite = run_suite(config.scenarios, &sink, config.threads);
  const auto report = make_report(config, suite);
  const auto path = (std::filesystem::path(config.output_dir) / "report.json").string();
  write_report_json(report, path);
  print_summary(suite, config.verbosity, out);
  out << "report: " << path << "\n"
      << "verdicts: " << report.verdicts.pass << " pass, " << report.verdicts.fail
      << " fail, " << report.verdicts.reported << " reported\n";
  return suite.passed() ? 0 : 1;
}

std::vector<double> parse_reals(const std::string& list) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pseudospectral simulator for the Schrodinger equation with "
               "sublinear damping on flat tori"};
  app.require_subcommand(1);

  std::string config_path, out_dir, sweep_param, sweep_values;
  int threads = 0;
  int verbosity = -1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Config file")->required();
    sub->add_option("--out", out_dir, "Output directory (overrides [output])");
    sub->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("-v,--verbosity", verbosity, "0: verdicts, 1: checks, 2: constants");
  };

  auto* run = app.add_subcommand("run", "Run a single scenario");
  add_common(run);
  auto* suite = app.add_subcommand("suite", "Run every scenario of a suite file");
  add_common(suite);
  auto* sweep = app.add_subcommand("sweep", "Sweep delta or gamma over a base scenario");
  add_common(sweep);
  sweep->add_option("--param", sweep_param, "delta or gamma")
      ->required()
      ->check(CLI::IsMember({"delta", "gamma"}));
  sweep->add_option("--values", sweep_values, "Comma-separated values")->required();

  Scenario nash;
  nash.name = "nash_bench";
  nash.kind = ScenarioKind::nash_ensemble;
  std::uint64_t nash_seed = 1;
  auto* bench = app.add_subcommand("nash-bench", "Empirical Nash constants over random ensembles");
  bench->add_option("--count", nash.ensemble_count, "Ensemble size")->check(CLI::Range(10, 1000000));
  bench->add_option("--seed", nash_seed, "Base seed");
  bench->add_option("--alphas", nash.ensemble_alphas, "Homogeneity exponents")->delimiter(',');
  bench->add_option("--orders", nash.ensemble_orders, "Sobolev orders (1, 2)")->delimiter(',');
  bench->add_option("--dims", nash.ensemble_dims, "Dimensions")->delimiter(',');
  bench->add_option("--out", out_dir, "Output directory");
  bench->add_option("-v,--verbosity", verbosity, "Output detail");

  double y0 = 0.0, alpha = 1.0, gamma = 1.0, delta = 0.0, t = 0.0;
  bool want_tc = false;
  auto* oracle = app.add_subcommand("ode-oracle", "Scalar damping ODE values");
  oracle->add_option("--y0", y0, "Initial squared modulus")->required()->check(CLI::NonNegativeNumber);
  oracle->add_option("--alpha", alpha, "Exponent in (0, 1]")->required()->check(CLI::Range(0.0, 1.0));
  oracle->add_option("--gamma", gamma, "Damping strength")->required()->check(CLI::PositiveNumber);
  oracle->add_option("--delta", delta, "Regularization (0: exact flow)")->check(CLI::NonNegativeNumber);
  oracle->add_option("--t", t, "Time")->check(CLI::NonNegativeNumber);
  oracle->add_flag("--tc", want_tc, "Print the extinction time |u0|^alpha/(alpha gamma) instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (oracle->parsed()) {
      if (!(alpha > 0.0)) throw ArgumentError("alpha must lie in (0, 1]");
      double value = 0.0;
      if (want_tc) value = ode_oracle_tc(std::sqrt(y0), alpha, gamma);
      else if (delta > 0.0) value = ode_oracle_regularized(y0, alpha, gamma, delta, t);
      else value = ode_oracle_exact(y0, alpha, gamma, t);
      out << num(value) << "\n";
      return 0;
    }
    if (bench->parsed()) {
      nash.initial.seed = nash_seed;
      RunConfig config;
      config.scenarios.push_back(nash);
      return execute(config, out_dir.empty() ? "sdnls-nash" : out_dir, 1, verbosity, out);
    }
    auto config = load_config(config_path);
    if (run->parsed()) {
      if (config.scenarios.size() != 1) {
        err << "run expects exactly one scenario, found " << config.scenarios.size()
            << " (use suite)\n";
        return 2;
      }
      return execute(config, out_dir, threads, verbosity, out);
    }
    if (suite->parsed()) return execute(config, out_dir, threads, verbosity, out);
    if (sweep->parsed()) {
      if (config.scenarios.size() != 1) {
        err << "sweep expects a single base scenario\n";
        return 2;
      }
      auto& base = config.scenarios.front();
      const auto values = parse_reals(sweep_values);
      base.checks.clear();
      if (sweep_param == "delta") {
        base.kind = ScenarioKind::regularized_sweep;
        base.deltas = values;
      } else {
        base.kind = ScenarioKind::gamma_sweep;
        base.gammas = values;
      }
      base.validate();
      return execute(config, out_dir, threads, verbosity, out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace sdnls
