#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sdnls/analysis.hpp"
#include "sdnls/random_field.hpp"

namespace sdnls {

struct GridSpec {
  int dim = 1;
  std::vector<int> points{256};
  std::vector<double> lengths{6.283185307179586};

  GridPtr build() const { return make_grid(dim, points, lengths); }
  bool operator==(const GridSpec&) const = default;
};

/// Desk-scale grid for a dimension: 256, 64^2 or 32^3 cells of side 2 pi.
GridSpec default_grid(int dim);

enum class InitialKind { constant, single_mode, random, file };

struct InitialDataSpec {
  InitialKind kind = InitialKind::constant;
  double amplitude = 1.0;
  double phase = 0.0;
  std::vector<int> modes;            ///< single_mode frequency indices
  std::uint64_t seed = 1;            ///< random
  int regularity = 1;                ///< random: 1 for H^1-type, 2 for H^2-type
  std::optional<double> decay;       ///< random: overrides d/2 + regularity
  double band_fraction = 0.25;       ///< random
  std::string path;                  ///< file: CSV with columns re,im

  bool operator==(const InitialDataSpec&) const = default;
};

ComplexField build_initial(GridPtr grid, const InitialDataSpec& spec);

enum class ScenarioKind {
  run,
  extinction_1d,
  extinction_23d,
  regularized_sweep,
  delta_convergence,
  gamma_sweep,
  nls_corollary,
  nash_ensemble,
};

const char* to_string(ScenarioKind kind);
std::optional<ScenarioKind> scenario_kind_from_string(const std::string& s);

struct Scenario {
  std::string name = "scenario";
  ScenarioKind kind = ScenarioKind::run;
  GridSpec grid;
  DampingParams damping;
  NlsParams nls;
  StepScheme scheme;
  /// Defaults to 10 / gamma.
  std::optional<double> t_max;
  InitialDataSpec initial;
  int record_every = 10;
  /// Empty means the kind's default checks.
  std::vector<std::string> checks;

  /// Extra seeds for multi-run extinction studies (random data only).
  std::vector<std::uint64_t> seeds;
  std::vector<double> deltas;
  std::vector<double> gammas;
  /// (lambda, sigma) pairs for the NLS study.
  std::vector<std::pair<double, double>> couplings;
  double slope_window_lo = 1e-8;
  double slope_window_hi = 1e-2;

  int ensemble_count = 100;
  std::vector<double> ensemble_alphas{0.5, 1.0};
  std::vector<int> ensemble_orders{1, 2};
  std::vector<int> ensemble_dims{1, 2};

  /// Runs without assertions (e.g. H^1 data in d >= 2).
  bool exploratory = false;

  double resolved_t_max() const;
  /// Throws ConfigError on invalid parameters or unknown check names.
  void validate() const;
  bool operator==(const Scenario&) const = default;
};

/// Every check identifier a scenario may request.
const std::vector<std::string>& known_checks();
std::vector<std::string> default_checks(ScenarioKind kind);

enum class CheckStatus { pass, fail, reported };
const char* to_string(CheckStatus s);

struct CheckOutcome {
  std::string id;
  CheckStatus status = CheckStatus::reported;
  std::optional<double> value;
  std::optional<double> threshold;
  std::string detail;

  bool operator==(const CheckOutcome&) const = default;
};

/// One simulation inside a scenario.
struct RunRecord {
  std::string label;
  TimeSeries series;
  ExtinctionReport extinction;
  std::int64_t steps = 0;
  double t_final = 0.0;

  bool operator==(const RunRecord&) const = default;
};

struct ScenarioResult {
  std::string name;
  ScenarioKind kind = ScenarioKind::run;
  std::vector<RunRecord> runs;
  std::vector<CheckOutcome> checks;
  /// Empirical constants: fitted slopes, Nash maxima, bounds, ...
  std::map<std::string, double> constants;
  double wall_seconds = 0.0;
  /// Set when the scenario threw; checks then hold a single failure.
  std::optional<std::string> error;

  bool passed() const;
  const CheckOutcome* find_check(const std::string& id) const;
  bool operator==(const ScenarioResult&) const = default;
};

struct SuiteResult {
  std::vector<ScenarioResult> entries;
  bool passed() const;
  std::size_t count(CheckStatus status) const;
  bool operator==(const SuiteResult&) const = default;
};

/// Receives each finished scenario; calls are serialized by run_suite.
class ResultSink {
 public:
  virtual ~ResultSink() = default;
  virtual void on_scenario(const Scenario& scenario,
                           const ScenarioResult& result) = 0;
};

ScenarioResult scenario_extinction_1d(const Scenario& s);
ScenarioResult scenario_extinction_23d(const Scenario& s);
ScenarioResult scenario_regularized_sweep(const Scenario& s);
ScenarioResult scenario_delta_convergence(const Scenario& s);
ScenarioResult scenario_gamma_sweep(const Scenario& s);
ScenarioResult scenario_nls_corollary(const Scenario& s);
ScenarioResult scenario_nash_ensemble(const Scenario& s);
/// Single simulation with whatever checks are requested.
ScenarioResult scenario_run(const Scenario& s);

/// Dispatches on s.kind; exceptions become a failed entry.
ScenarioResult run_scenario(const Scenario& s);

/// Runs all scenarios on up to `threads` workers. Entry order matches input.
SuiteResult run_suite(const std::vector<Scenario>& suite, ResultSink* sink,
                      int threads = 1);

}  // namespace sdnls
