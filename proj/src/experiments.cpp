#include "sdnls/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include "sdnls/errors.hpp"
#include "sdnls/spectral.hpp"
#include "sdnls/trajectory.hpp"

namespace sdnls {

// ---- specs ----------------------------------------------------------------

GridSpec default_grid(int dim) {
  const double L = 2.0 * std::numbers::pi;
  switch (dim) {
    case 1: return {1, {256}, {L}};
    case 2: return {2, {64, 64}, {L, L}};
    case 3: return {3, {32, 32, 32}, {L, L, L}};
    default: throw ConfigError("dimension must be 1, 2 or 3");
  }
}

namespace {

ComplexField read_field_csv(GridPtr grid, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open initial data file '" + path + "'");
  std::vector<Complex> values;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw IoError("malformed row in '" + path + "': " + line);
    }
    values.emplace_back(std::stod(line.substr(0, comma)),
                        std::stod(line.substr(comma + 1)));
  }
  if (values.size() != grid->size()) {
    throw ConfigError("initial data file '" + path + "' has " +
                      std::to_string(values.size()) + " cells, grid has " +
                      std::to_string(grid->size()));
  }
  return ComplexField(std::move(grid), std::move(values));
}

}  // namespace

ComplexField build_initial(GridPtr grid, const InitialDataSpec& spec) {
  switch (spec.kind) {
    case InitialKind::constant:
      return constant_field(grid, std::polar(spec.amplitude, spec.phase));
    case InitialKind::single_mode:
      return plane_wave(grid, spec.modes, std::polar(spec.amplitude, spec.phase));
    case InitialKind::random: {
      RandomFieldSpec r;
      r.seed = spec.seed;
      r.decay = spec.decay.value_or(default_decay(grid->dim(), spec.regularity));
      r.amplitude = spec.amplitude;
      r.band_fraction = spec.band_fraction;
      return random_field(grid, r);
    }
    case InitialKind::file:
      return read_field_csv(grid, spec.path);
  }
  throw ConfigError("unknown initial data kind");
}

const char* to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::run: return "run";
    case ScenarioKind::extinction_1d: return "extinction_1d";
    case ScenarioKind::extinction_23d: return "extinction_23d";
    case ScenarioKind::regularized_sweep: return "regularized_sweep";
    case ScenarioKind::delta_convergence: return "delta_convergence";
    case ScenarioKind::gamma_sweep: return "gamma_sweep";
    case ScenarioKind::nls_corollary: return "nls_corollary";
    case ScenarioKind::nash_ensemble: return "nash_ensemble";
  }
  return "?";
}

std::optional<ScenarioKind> scenario_kind_from_string(const std::string& s) {
  for (auto k : {ScenarioKind::run, ScenarioKind::extinction_1d,
                 ScenarioKind::extinction_23d, ScenarioKind::regularized_sweep,
                 ScenarioKind::delta_convergence, ScenarioKind::gamma_sweep,
                 ScenarioKind::nls_corollary, ScenarioKind::nash_ensemble}) {
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::reported: return "reported";
  }
  return "?";
}

const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> ids{
      "extinct",          "no_extinction",     "extinction_bound",
      "t_v_matches_tc",   "mass_monotone",     "mass_conserved",
      "mass_law",         "h1_monotone",       "h2_persistence",
      "dtu_monotone",     "energy_monotone",   "contraction",
      "holder",           "slopes_steepen",    "slope_scaling",
      "linear_slope",     "floor_time_trend",  "delta_convergence",
      "gamma_scaling",    "lambda_zero_reduction", "h1_bounded",
      "nash_constant_field", "nash_finite",    "nash_stable",
      "nash_amplitude_invariance", "gn_ratio",
  };
  return ids;
}

std::vector<std::string> default_checks(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::run:
      return {"mass_monotone", "mass_law"};
    case ScenarioKind::extinction_1d:
      return {"extinct", "extinction_bound", "t_v_matches_tc", "mass_monotone",
              "mass_law"};
    case ScenarioKind::extinction_23d:
      return {"extinct", "extinction_bound", "t_v_matches_tc", "mass_monotone",
              "h2_persistence"};
    case ScenarioKind::regularized_sweep:
      return {"no_extinction", "slopes_steepen", "slope_scaling",
              "floor_time_trend"};
    case ScenarioKind::delta_convergence:
      return {"delta_convergence"};
    case ScenarioKind::gamma_sweep:
      return {"extinct", "t_v_matches_tc", "gamma_scaling"};
    case ScenarioKind::nls_corollary:
      return {"extinct", "mass_monotone", "h1_bounded", "energy_monotone",
              "lambda_zero_reduction"};
    case ScenarioKind::nash_ensemble:
      return {"nash_constant_field", "nash_finite", "nash_stable",
              "nash_amplitude_invariance"};
  }
  return {};
}

namespace {

std::vector<std::string> effective_checks(const Scenario& s) {
  if (!s.checks.empty()) return s.checks;
  auto ids = default_checks(s.kind);
  const bool undamped = s.damping.gamma == 0.0;
  const bool extinction_kind = s.kind == ScenarioKind::extinction_1d ||
                               s.kind == ScenarioKind::extinction_23d;
  if (extinction_kind && undamped) {
    return {"no_extinction", "mass_conserved", "mass_monotone"};
  }
  if (extinction_kind && s.initial.kind != InitialKind::constant) {
    std::erase(ids, std::string("t_v_matches_tc"));
  }
  return ids;
}

}  // namespace

double Scenario::resolved_t_max() const {
  if (t_max) return *t_max;
  if (damping.gamma == 0.0) {
    throw ConfigError("scenario '" + name + "': t_max is required when gamma = 0");
  }
  return 10.0 / damping.gamma;
}

void Scenario::validate() const {
  if (name.empty()) throw ConfigError("scenario name must not be empty");
  make_grid(grid.dim, grid.points, grid.lengths);
  damping.validate();
  nls.validate();
  scheme.validate();
  if (record_every < 1) throw ConfigError("record_every must be >= 1");
  if (t_max && !(*t_max > 0.0)) throw ConfigError("t_max must be > 0");
  (void)resolved_t_max();
  const auto& known = known_checks();
  for (const auto& c : checks) {
    if (std::find(known.begin(), known.end(), c) == known.end()) {
      throw ConfigError("scenario '" + name + "': unknown check '" + c + "'");
    }
  }
  if (initial.kind == InitialKind::single_mode &&
      initial.modes.size() != static_cast<std::size_t>(grid.dim)) {
    throw ConfigError("single-mode data needs one index per axis");
  }
  if (initial.kind == InitialKind::random &&
      (initial.regularity < 1 || initial.regularity > 2)) {
    throw ConfigError("random data regularity must be 1 or 2");
  }
  if (!(initial.amplitude >= 0.0)) throw ConfigError("amplitude must be >= 0");
  switch (kind) {
    case ScenarioKind::extinction_1d:
      if (grid.dim != 1) throw ConfigError("extinction_1d needs a 1-D grid");
      if (damping.delta != 0.0) throw ConfigError("extinction studies need delta = 0");
      break;
    case ScenarioKind::extinction_23d:
      if (grid.dim < 2) throw ConfigError("extinction_23d needs d = 2 or 3");
      if (damping.delta != 0.0) throw ConfigError("extinction studies need delta = 0");
      break;
    case ScenarioKind::regularized_sweep:
    case ScenarioKind::delta_convergence:
      if (deltas.empty()) throw ConfigError("delta list must not be empty");
      for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (!(deltas[i] > 0.0)) throw ConfigError("swept deltas must be > 0");
        if (i > 0 && !(deltas[i] < deltas[i - 1])) {
          throw ConfigError("swept deltas must be strictly decreasing");
        }
      }
      break;
    case ScenarioKind::gamma_sweep:
      if (gammas.empty()) throw ConfigError("gamma list must not be empty");
      for (double g : gammas) {
        if (!(g > 0.0)) throw ConfigError("swept gammas must be > 0");
      }
      break;
    case ScenarioKind::nls_corollary:
      if (grid.dim != 1) throw ConfigError("the NLS study is 1-D only");
      for (const auto& [lambda, sigma] : couplings) {
        NlsParams{lambda, sigma, true}.validate();
      }
      break;
    case ScenarioKind::nash_ensemble:
      if (ensemble_count < 10) throw ConfigError("ensemble count must be >= 10");
      for (double a : ensemble_alphas) {
        if (!(a > 0.0 && a <= 1.0)) throw ConfigError("ensemble alpha must be in (0, 1]");
      }
      for (int o : ensemble_orders) {
        if (o != 1 && o != 2) throw ConfigError("ensemble orders must be 1 or 2");
      }
      for (int d : ensemble_dims) {
        if (d < 1 || d > 3) throw ConfigError("ensemble dims must be 1, 2 or 3");
      }
      break;
    case ScenarioKind::run:
      break;
  }
}

// ---- results --------------------------------------------------------------

bool ScenarioResult::passed() const {
  if (error) return false;
  return std::none_of(checks.begin(), checks.end(), [](const CheckOutcome& c) {
    return c.status == CheckStatus::fail;
  });
}

const CheckOutcome* ScenarioResult::find_check(const std::string& id) const {
  for (const auto& c : checks) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

bool SuiteResult::passed() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const ScenarioResult& r) { return r.passed(); });
}

std::size_t SuiteResult::count(CheckStatus status) const {
  std::size_t n = 0;
  for (const auto& e : entries) {
    for (const auto& c : e.checks) n += c.status == status;
  }
  return n;
}

// ---- scenario machinery ---------------------------------------------------

namespace {

std::string fmt_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

class Checks {
 public:
  Checks(const Scenario& s, ScenarioResult& out)
      : wanted_(effective_checks(s)), exploratory_(s.exploratory), out_(out) {}

  bool wants(const std::string& id) const {
    return std::find(wanted_.begin(), wanted_.end(), id) != wanted_.end();
  }

  void verdict(const std::string& id, bool ok, std::optional<double> value = {},
               std::optional<double> threshold = {}, std::string detail = {}) {
    if (!wants(id)) return;
    const auto status = exploratory_ ? CheckStatus::reported
                                     : (ok ? CheckStatus::pass : CheckStatus::fail);
    out_.checks.push_back({id, status, value, threshold, std::move(detail)});
  }

  void report(const std::string& id, std::optional<double> value,
              std::string detail = {}) {
    if (!wants(id)) return;
    out_.checks.push_back({id, CheckStatus::reported, value, {}, std::move(detail)});
  }

  /// Requested checks this scenario kind cannot evaluate.
  void finish() {
    for (const auto& id : wanted_) {
      if (!out_.find_check(id)) {
        out_.checks.push_back({id, CheckStatus::fail, {}, {},
                               "check is not available for this scenario"});
      }
    }
  }

 private:
  std::vector<std::string> wanted_;
  bool exploratory_;
  ScenarioResult& out_;
};

struct SimulationSetup {
  DampingParams damping;
  NlsParams nls;
  StepScheme scheme;
  double t_max = 1.0;
  int record_every = 1;
  bool keep_states = false;
  bool compute_dtu = false;
  bool stop_on_extinction = true;
  /// Sobolev order of the Nash ratio tracked along the run (0 = off).
  int nash_order = 0;
};

struct SimulationRun {
  SimulationResult result;
  TimeSeries series;
  Trajectory states;
  double nash_max = 0.0;
  InitialNorms u0_norms;
};

SimulationRun simulate(const ComplexField& u0, const SimulationSetup& setup) {
  SimulationRun run;
  const auto spectrum = to_spectral(u0);
  run.u0_norms = {sobolev_norm(spectrum, 0.0), sobolev_norm(spectrum, 1.0),
                  sobolev_norm(spectrum, 2.0)};
  TrajectoryRecorder recorder(setup.damping, setup.nls,
                              {setup.keep_states, setup.compute_dtu});
  const double threshold = extinction_threshold(setup.damping, u0.max_modulus());
  auto callback = [&](double t, const ComplexField& u) {
    recorder.record(t, u);
    if (setup.nash_order > 0 && !is_extinct(u, threshold)) {
      run.nash_max = std::max(run.nash_max,
                              nash_ratio(u, setup.damping.alpha, setup.nash_order));
    }
  };
  RunOptions options;
  options.t_max = setup.t_max;
  options.record_every = setup.record_every;
  options.stop_on_extinction = setup.stop_on_extinction;
  run.result = run_simulation(u0, setup.damping, setup.nls, setup.scheme, options,
                              callback);
  run.series = recorder.take_series();
  run.states = recorder.states();
  return run;
}

SimulationSetup setup_from(const Scenario& s) {
  SimulationSetup setup;
  setup.damping = s.damping;
  setup.nls = s.nls;
  setup.scheme = s.scheme;
  setup.t_max = s.resolved_t_max();
  setup.record_every = s.record_every;
  return setup;
}

RunRecord to_record(std::string label, const SimulationRun& run) {
  RunRecord r;
  r.label = std::move(label);
  r.series = run.series;
  r.steps = run.result.steps;
  r.t_final = run.result.t_final;
  r.extinction.extinct = run.result.extinct;
  r.extinction.t_v = run.result.t_v;
  r.extinction.mass_at_end = run.result.final_state.max_modulus();
  r.extinction.nash_constant_estimate = run.nash_max;
  return r;
}

/// Largest relative increase of mass_sq between consecutive records.
double worst_mass_increase(const TimeSeries& series) {
  double worst = 0.0;
  for (std::size_t i = 1; i < series.size(); ++i) {
    const double prev = series[i - 1].mass_sq;
    if (prev > 0.0) worst = std::max(worst, (series[i].mass_sq - prev) / prev);
    else if (series[i].mass_sq > 0.0) worst = std::numeric_limits<double>::infinity();
  }
  return worst;
}

/// Max mass-law residual over records strictly before extinction.
double max_mass_law_residual(const TimeSeries& series, std::optional<double> t_v) {
  double worst = 0.0;
  for (std::size_t i = 1; i < series.size(); ++i) {
    if (t_v && series[i].t >= *t_v) break;
    worst = std::max(worst, series[i].mass_law_residual);
  }
  return worst;
}

constexpr double kMassMonotoneTol = 1e-12;
constexpr double kMassConservedTol = 1e-10;
constexpr double kContractionTol = 1e-10;
constexpr double kH1MonotoneTol = 1e-8;
constexpr double kEnergyMonotoneTol = 1e-8;
constexpr double kSlopeScalingTol = 0.30;
constexpr double kLinearSlopeTol = 0.05;
constexpr double kGammaScalingTol = 0.01;
constexpr double kNashConstantTol = 1e-10;
constexpr double kAmplitudeInvarianceTol = 1e-10;
constexpr double kLambdaZeroTol = 1e-12;
// du/dt monotonicity violations allowed at dt = 1e-3, scaled by (dt/1e-3)^2.
constexpr double kDtuTolAtMilli = 1e-6;
// Seed offset of the partner trajectory in contraction checks.
constexpr std::uint64_t kPartnerSeedOffset = 7919;

double h1_worst_increase(const TimeSeries& series, std::optional<double> t_v) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < series.size(); ++i) {
    if (t_v && series[i].t > *t_v) break;
    worst = std::max(worst, (series[i].h1 - series[i - 1].h1) /
                                (1.0 + series[i - 1].h1));
  }
  return series.size() < 2 ? 0.0 : worst;
}

double energy_worst_increase(const TimeSeries& series) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < series.size(); ++i) {
    if (!series[i].nls_energy || !series[i - 1].nls_energy) continue;
    const double prev = *series[i - 1].nls_energy;
    worst = std::max(worst, (*series[i].nls_energy - prev) / (1.0 + std::abs(prev)));
  }
  return worst;
}

/// Checks shared by every simulation-backed scenario.
void common_run_checks(const Scenario& s, Checks& checks,
                       const std::vector<SimulationRun>& runs) {
  double mass_worst = 0.0, law_worst = 0.0;
  for (const auto& r : runs) {
    mass_worst = std::max(mass_worst, worst_mass_increase(r.series));
    law_worst = std::max(law_worst, max_mass_law_residual(r.series, r.result.t_v));
  }
  checks.verdict("mass_monotone", mass_worst <= kMassMonotoneTol, mass_worst,
                 kMassMonotoneTol, "largest relative mass increase between records");
  checks.report("mass_law", law_worst,
                "max mass-law residual before extinction");
  if (checks.wants("h1_monotone")) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& r : runs) worst = std::max(worst, h1_worst_increase(r.series, r.result.t_v));
    if (s.damping.regularized() && !s.nls.enabled) {
      checks.verdict("h1_monotone", worst <= kH1MonotoneTol, worst, kH1MonotoneTol,
                     "largest H1 increase / (1 + H1)");
    } else {
      checks.report("h1_monotone", worst,
                    "largest H1 increase / (1 + H1); not asserted without regularization");
    }
  }
  if (checks.wants("energy_monotone")) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& r : runs) worst = std::max(worst, energy_worst_increase(r.series));
    if (s.damping.regularized()) {
      checks.verdict("energy_monotone", worst <= kEnergyMonotoneTol, worst,
                     kEnergyMonotoneTol, "largest energy increase / (1 + |E|)");
    } else {
      checks.report("energy_monotone", worst,
                    "largest energy increase / (1 + |E|); not asserted for delta = 0");
    }
  }
}

void extinction_checks(const Scenario& s, ScenarioResult& out, Checks& checks,
                       std::vector<SimulationRun>& runs,
                       const std::vector<ComplexField>& initial) {
  const int dim = s.grid.dim;
  const double dt = s.scheme.dt;
  bool all_extinct = true, none_extinct = true, all_bounded = true;
  double worst_bound_margin = std::numeric_limits<double>::infinity();
  double worst_tc_gap = 0.0, worst_conservation = 0.0;
  bool h2_ok = true;
  double h2_worst_trend = 0.0;

  for (std::size_t i = 0; i < runs.size(); ++i) {
    auto& run = runs[i];
    auto& rec = out.runs[i];
    const std::string& label = rec.label;
    all_extinct &= run.result.extinct;
    none_extinct &= !run.result.extinct;
    if (run.result.t_v) out.constants[label + ".t_v"] = *run.result.t_v;
    out.constants[label + ".nash_max"] = run.nash_max;

    double sobolev_sup = 0.0;
    for (const auto& r : run.series) sobolev_sup = std::max(sobolev_sup, dim == 1 ? r.h1 : r.h2);
    out.constants[label + (dim == 1 ? ".h1_sup" : ".h2_sup")] = sobolev_sup;

    if (!checks.wants("extinction_bound")) {
      // bound needs the Nash constant tracked along the run
    } else if (run.result.extinct && s.damping.gamma > 0.0) {
      const bool ok = extinction_bound_check(rec.extinction, run.u0_norms, sobolev_sup,
                                             s.damping.gamma, s.damping.alpha, dim,
                                             run.nash_max);
      const double bound = dim == 1 ? *rec.extinction.bound_1d : *rec.extinction.bound_23d;
      out.constants[label + ".bound"] = bound;
      all_bounded &= ok;
      worst_bound_margin = std::min(worst_bound_margin, bound - *run.result.t_v);
    } else {
      all_bounded = false;
    }

    if (s.initial.kind == InitialKind::constant && run.result.t_v) {
      const double tc = ode_oracle_tc(initial[i].max_modulus(), s.damping.alpha,
                                      s.damping.gamma);
      worst_tc_gap = std::max(worst_tc_gap, std::abs(*run.result.t_v - tc));
    } else if (s.initial.kind == InitialKind::constant) {
      worst_tc_gap = std::numeric_limits<double>::infinity();
    }

    if (!run.series.empty()) {
      const double m0 = run.series.front().mass_sq;
      const double m1 = run.series.back().mass_sq;
      worst_conservation = std::max(worst_conservation, std::abs(m1 - m0) / m0);
    }

    if (checks.wants("h2_persistence")) {
      const auto h2 = h2_persistence_check(run.series, run.u0_norms.h2, run.result.t_v);
      out.constants[label + ".h2_constant"] = h2.constant;
      h2_ok &= h2.bounded;
      if (h2.first_quarter_max > 0.0) {
        h2_worst_trend = std::max(h2_worst_trend,
                                  h2.last_quarter_max / h2.first_quarter_max);
      }
    }
  }

  checks.verdict("extinct", all_extinct, static_cast<double>(runs.size()), {},
                 "every run reached extinction before t_max");
  checks.verdict("no_extinction", none_extinct, {}, {}, "no run reached extinction");
  checks.verdict("extinction_bound", all_bounded, worst_bound_margin, 0.0,
                 "smallest (bound - t_v) over runs");
  checks.verdict("t_v_matches_tc", worst_tc_gap <= 2.0 * dt, worst_tc_gap, 2.0 * dt,
                 "|t_v - |u0|^alpha/(alpha gamma)|");
  checks.verdict("mass_conserved", worst_conservation <= kMassConservedTol,
                 worst_conservation, kMassConservedTol, "relative mass change");
  checks.verdict("h2_persistence", h2_ok, h2_worst_trend, 1.05,
                 "last-quarter / first-quarter H2 maximum");
}

ScenarioResult extinction_study(const Scenario& s) {
  ScenarioResult out;
  out.name = s.name;
  out.kind = s.kind;
  Checks checks(s, out);
  const auto grid = s.grid.build();

  std::vector<InitialDataSpec> specs;
  if (s.initial.kind == InitialKind::random && !s.seeds.empty()) {
    for (auto seed : s.seeds) {
      auto spec = s.initial;
      spec.seed = seed;
      specs.push_back(spec);
    }
  } else {
    specs.push_back(s.initial);
  }

  auto setup = setup_from(s);
  setup.nash_order = s.grid.dim == 1 ? 1 : 2;
  std::vector<SimulationRun> runs;
  std::vector<ComplexField> initial;
  for (const auto& spec : specs) {
    initial.push_back(build_initial(grid, spec));
    runs.push_back(simulate(initial.back(), setup));
    const std::string label = spec.kind == InitialKind::random
                                  ? "seed=" + std::to_string(spec.seed)
                                  : std::string("run");
    out.runs.push_back(to_record(label, runs.back()));
  }
  extinction_checks(s, out, checks, runs, initial);
  common_run_checks(s, checks, runs);
  checks.finish();
  return out;
}

}  // namespace

ScenarioResult scenario_extinction_1d(const Scenario& s) {
  auto copy = s;
  copy.kind = ScenarioKind::extinction_1d;
  copy.validate();
  return extinction_study(copy);
}

ScenarioResult scenario_extinction_23d(const Scenario& s) {
  auto copy = s;
  copy.kind = ScenarioKind::extinction_23d;
  // Extinction in d >= 2 is only claimed for H^2 data.
  if (copy.initial.kind == InitialKind::random && copy.initial.regularity < 2) {
    copy.exploratory = true;
  }
  copy.validate();
  return extinction_study(copy);
}

ScenarioResult scenario_regularized_sweep(const Scenario& s) {
  s.validate();
  ScenarioResult out;
  out.name = s.name;
  out.kind = ScenarioKind::regularized_sweep;
  Checks checks(s, out);
  const auto grid = s.grid.build();
  const auto u0 = build_initial(grid, s.initial);
  const double m0 = lp_integral(u0, 2.0);

  std::vector<double> slopes;
  std::vector<double> floor_times;
  bool none_extinct = true;
  bool all_fitted = true;
  std::vector<SimulationRun> runs;
  for (double delta : s.deltas) {
    auto setup = setup_from(s);
    setup.damping.delta = delta;
    runs.push_back(simulate(u0, setup));
    const auto& run = runs.back();
    const std::string label = "delta=" + fmt_number(delta);
    out.runs.push_back(to_record(label, run));

    double min_mass = std::numeric_limits<double>::infinity();
    std::optional<double> floor_time;
    for (const auto& r : run.series) {
      min_mass = std::min(min_mass, r.mass_sq);
      if (!floor_time && r.mass_sq <= 1e-6 * m0) floor_time = r.t;
    }
    none_extinct &= !run.result.extinct && min_mass > 0.0;
    const auto slope = fit_log_mass_slope(run.series, s.slope_window_lo,
                                          s.slope_window_hi);
    if (slope) {
      out.constants[label + ".slope"] = *slope;
      slopes.push_back(*slope);
    } else {
      all_fitted = false;
      slopes.push_back(std::numeric_limits<double>::quiet_NaN());
    }
    floor_times.push_back(floor_time.value_or(std::numeric_limits<double>::infinity()));
    if (floor_time) out.constants[label + ".time_to_1e-6"] = *floor_time;
  }

  checks.verdict("no_extinction", none_extinct, {}, {},
                 "no regularized run reached zero before t_max");

  bool steepen = all_fitted;
  for (std::size_t i = 1; i < slopes.size(); ++i) {
    steepen &= std::abs(slopes[i]) > std::abs(slopes[i - 1]);
  }
  checks.verdict("slopes_steepen", steepen, {}, {},
                 "|fitted log-mass slope| strictly increases as delta decreases");

  double worst_dev = all_fitted ? 0.0 : std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; all_fitted && i < slopes.size(); ++i) {
    const double measured = std::abs(slopes[i] / slopes[i - 1]);
    const double predicted = std::pow(s.deltas[i - 1] / s.deltas[i], 0.5 * s.damping.alpha);
    out.constants["slope_ratio[" + std::to_string(i) + "]"] = measured;
    worst_dev = std::max(worst_dev, std::abs(measured / predicted - 1.0));
  }
  checks.verdict("slope_scaling", worst_dev <= kSlopeScalingTol, worst_dev,
                 kSlopeScalingTol, "worst |measured/predicted - 1| of slope ratios");

  if (checks.wants("linear_slope")) {
    const double predicted = -2.0 * s.damping.gamma /
                             std::pow(s.deltas.front(), 0.5 * s.damping.alpha);
    const double dev = all_fitted || !std::isnan(slopes.front())
                           ? std::abs(slopes.front() / predicted - 1.0)
                           : std::numeric_limits<double>::infinity();
    checks.verdict("linear_slope", dev <= kLinearSlopeTol, dev, kLinearSlopeTol,
                   "first delta: |slope / (-2 gamma delta^(-alpha/2)) - 1|");
  }

  if (checks.wants("floor_time_trend")) {
    // Reference: extinction time of the unregularized flow, from the scalar
    // oracle for constant data and from a delta = 0 run otherwise.
    double t_ref = 0.0;
    if (s.initial.kind == InitialKind::constant) {
      t_ref = ode_oracle_tc(u0.max_modulus(), s.damping.alpha, s.damping.gamma);
    } else {
      auto setup = setup_from(s);
      setup.damping.delta = 0.0;
      t_ref = simulate(u0, setup).result.t_v.value_or(
          std::numeric_limits<double>::infinity());
    }
    out.constants["delta0.t_v"] = t_ref;
    bool decreasing = true;
    double last_gap = std::numeric_limits<double>::infinity();
    for (double ft : floor_times) {
      const double gap = std::abs(ft - t_ref);
      decreasing &= gap < last_gap;
      last_gap = gap;
    }
    checks.verdict("floor_time_trend", decreasing, last_gap, {},
                   "|time to mass 1e-6 - delta=0 extinction time| decreases with delta");
  }
  common_run_checks(s, checks, runs);
  checks.finish();
  return out;
}

ScenarioResult scenario_delta_convergence(const Scenario& s) {
  s.validate();
  ScenarioResult out;
  out.name = s.name;
  out.kind = ScenarioKind::delta_convergence;
  Checks checks(s, out);
  const auto grid = s.grid.build();
  const auto u0 = build_initial(grid, s.initial);

  auto setup = setup_from(s);
  setup.keep_states = true;
  setup.stop_on_extinction = false;
  setup.damping.delta = 0.0;
  const auto reference = simulate(u0, setup);
  out.runs.push_back(to_record("delta=0", reference));

  std::vector<double> distances;
  double oracle_gap = 0.0;
  for (double delta : s.deltas) {
    setup.damping.delta = delta;
    const auto run = simulate(u0, setup);
    const std::string label = "delta=" + fmt_number(delta);
    out.runs.push_back(to_record(label, run));
    if (run.states.size() != reference.states.size()) {
      throw std::logic_error("delta runs sampled differently from the reference");
    }
    double worst = 0.0;
    for (std::size_t n = 0; n < run.states.size(); ++n) {
      const double dist = lp_norm(run.states[n].state - reference.states[n].state, 2.0);
      worst = std::max(worst, dist);
      if (s.initial.kind == InitialKind::constant) {
        // Spatially constant data follow the scalar ODEs exactly.
        const double y0 = std::norm(u0[0]);
        const double t = run.states[n].t;
        const double r_delta =
            std::sqrt(ode_oracle_regularized(y0, s.damping.alpha, s.damping.gamma, delta, t));
        const double r_exact =
            std::sqrt(ode_oracle_exact(y0, s.damping.alpha, s.damping.gamma, t));
        const double predicted = std::abs(r_delta - r_exact) * std::sqrt(grid->volume());
        oracle_gap = std::max(oracle_gap, std::abs(dist - predicted));
      }
    }
    distances.push_back(worst);
    out.constants[label + ".max_l2_distance"] = worst;
  }
  if (s.initial.kind == InitialKind::constant) out.constants["oracle_gap"] = oracle_gap;

  bool decreasing = true;
  for (std::size_t i = 1; i < distances.size(); ++i) {
    decreasing &= distances[i] < distances[i - 1];
  }
  checks.verdict("delta_convergence", decreasing, distances.back(), {},
                 "max-in-time L2 distance to the delta = 0 run strictly decreases");
  checks.finish();
  return out;
}

ScenarioResult scenario_gamma_sweep(const Scenario& s) {
  s.validate();
  ScenarioResult out;
  out.name = s.name;
  out.kind = ScenarioKind::gamma_sweep;
  Checks checks(s, out);
  const auto grid = s.grid.build();
  const auto u0 = build_initial(grid, s.initial);

  std::vector<double> scaled;
  bool all_extinct = true;
  double worst_tc_gap = 0.0;
  std::vector<SimulationRun> runs;
  for (double gamma : s.gammas) {
    auto setup = setup_from(s);
    setup.damping.gamma = gamma;
    setup.t_max = s.t_max.value_or(10.0 / gamma);
    runs.push_back(simulate(u0, setup));
    const auto& run = runs.back();
    const std::string label = "gamma=" + fmt_number(gamma);
    out.runs.push_back(to_record(label, run));
    all_extinct &= run.result.extinct;
    if (run.result.t_v) {
      out.constants[label + ".t_v"] = *run.result.t_v;
      scaled.push_back(*run.result.t_v * gamma);
      if (s.initial.kind == InitialKind::constant) {
        const double tc = ode_oracle_tc(u0.max_modulus(), s.damping.alpha, gamma);
        worst_tc_gap = std::max(worst_tc_gap, std::abs(*run.result.t_v - tc));
      }
    } else {
      worst_tc_gap = std::numeric_limits<double>::infinity();
    }
  }
  checks.verdict("extinct", all_extinct, {}, {}, "every gamma reached extinction");
  checks.verdict("t_v_matches_tc", worst_tc_gap <= 2.0 * s.scheme.dt, worst_tc_gap,
                 2.0 * s.scheme.dt, "|t_v - t_c| over gammas");
  double spread = std::numeric_limits<double>::infinity();
  if (all_extinct && !scaled.empty()) {
    const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
    double mean = 0.0;
    for (double v : scaled) mean += v / scaled.size();
    spread = (*hi - *lo) / mean;
  }
  checks.verdict("gamma_scaling", spread <= kGammaScalingTol, spread, kGammaScalingTol,
                 "(max - min) / mean of t_v * gamma");
  common_run_checks(s, checks, runs);
  checks.finish();
  return out;
}

ScenarioResult scenario_nls_corollary(const Scenario& s) {
  s.validate();
  ScenarioResult out;
  out.name = s.name;
  out.kind = ScenarioKind::nls_corollary;
  Checks checks(s, out);
  const auto grid = s.grid.build();
  const auto u0 = build_initial(grid, s.initial);

  auto couplings = s.couplings;
  if (couplings.empty()) couplings = {{1.0, 1.0}, {-1.0, 1.0}};

  bool all_extinct = true;
  bool h1_finite = true;
  std::vector<SimulationRun> runs;
  for (const auto& [lambda, sigma] : couplings) {
    auto setup = setup_from(s);
    setup.nls = {lambda, sigma, true};
    runs.push_back(simulate(u0, setup));
    const auto& run = runs.back();
    const std::string label = "lambda=" + fmt_number(lambda) + ",sigma=" + fmt_number(sigma);
    out.runs.push_back(to_record(label, run));
    all_extinct &= run.result.extinct;
    if (run.result.t_v) out.constants[label + ".t_v"] = *run.result.t_v;
    double h1_sup = 0.0;
    for (const auto& r : run.series) h1_sup = std::max(h1_sup, r.h1);
    out.constants[label + ".h1_sup_ratio"] = h1_sup / run.u0_norms.h1;
    if (lambda < 0.0) h1_finite &= std::isfinite(h1_sup);
    if (!run.series.empty() && run.series.front().nls_energy) {
      out.constants[label + ".energy0"] = *run.series.front().nls_energy;
    }
  }
  checks.verdict("extinct", all_extinct, {}, {}, "every coupling reached extinction");
  checks.verdict("h1_bounded", h1_finite, {}, {},
                 "focusing runs keep a finite H1 supremum (ratio in constants)");

  if (checks.wants("lambda_zero_reduction")) {
    auto with = setup_from(s);
    with.nls = {0.0, 1.0, true};
    auto without = setup_from(s);
    without.nls = {0.0, 1.0, false};
    with.keep_states = without.keep_states = true;
    const auto a = simulate(u0, with);
    const auto b = simulate(u0, without);
    double diff = a.states.size() == b.states.size()
                      ? 0.0
                      : std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < std::min(a.states.size(), b.states.size()); ++n) {
      diff = std::max(diff, (a.states[n].state - b.states[n].state).max_modulus());
    }
    checks.verdict("lambda_zero_reduction", diff <= kLambdaZeroTol, diff, kLambdaZeroTol,
                   "max |u_{lambda=0} - u_{pure damping}| over records");
  }
  common_run_checks(s, checks, runs);
  checks.finish();
  return out;
}

ScenarioResult scenario_nash_ensemble(const Scenario& s) {
  s.validate();
  ScenarioResult out;
  out.name = s.name;
  out.kind = ScenarioKind::nash_ensemble;
  Checks checks(s, out);

  double worst_constant = 0.0;
  double worst_amplitude = 0.0;
  bool finite = true, stable = true;
  double worst_growth = 0.0;
  for (int dim : s.ensemble_dims) {
    GridSpec gs = s.grid.dim == dim ? s.grid : default_grid(dim);
    const auto grid = gs.build();
    const double volume = grid->volume();
    for (int order : s.ensemble_orders) {
      std::vector<ComplexField> members;
      for (int i = 0; i < 2 * s.ensemble_count; ++i) {
        RandomFieldSpec spec;
        spec.seed = s.initial.seed * 1000003ULL + static_cast<std::uint64_t>(i);
        spec.decay = default_decay(dim, order);
        members.push_back(random_field(grid, spec));
      }
      for (double alpha : s.ensemble_alphas) {
        const std::string key = "d=" + std::to_string(dim) + ",s=" + std::to_string(order) +
                                ",alpha=" + fmt_number(alpha);
        // Constant field: every norm is explicit and the ratio is V^(-s alpha).
        const double constant_ratio =
            nash_ratio(constant_field(grid, 1.7), alpha, order);
        const double expected = std::pow(volume, -order * alpha);
        worst_constant = std::max(worst_constant,
                                  std::abs(constant_ratio / expected - 1.0));

        double max_single = 0.0, max_double = 0.0;
        for (int i = 0; i < 2 * s.ensemble_count; ++i) {
          const double ratio = nash_ratio(members[i], alpha, order);
          finite &= std::isfinite(ratio) && ratio > 0.0;
          if (i < s.ensemble_count) {
            max_single = std::max(max_single, ratio);
            const double scaled = nash_ratio(3.25 * members[i], alpha, order);
            worst_amplitude = std::max(worst_amplitude, std::abs(scaled / ratio - 1.0));
          }
          max_double = std::max(max_double, ratio);
        }
        out.constants[key + ".max"] = max_single;
        out.constants[key + ".max_doubled"] = max_double;
        const double growth = max_double / max_single;
        worst_growth = std::max(worst_growth, growth);
        stable &= growth <= 2.0;
      }
    }
  }
  checks.verdict("nash_constant_field", worst_constant <= kNashConstantTol, worst_constant,
                 kNashConstantTol, "|ratio / V^(-s alpha) - 1| for constant fields");
  checks.verdict("nash_finite", finite, {}, {}, "every ensemble ratio finite and positive");
  checks.verdict("nash_stable", stable, worst_growth, 2.0,
                 "max over doubled ensemble / max over base ensemble");
  checks.verdict("nash_amplitude_invariance", worst_amplitude <= kAmplitudeInvarianceTol,
                 worst_amplitude, kAmplitudeInvarianceTol,
                 "relative change of the ratio under amplitude scaling");
  checks.finish();
  return out;
}

ScenarioResult scenario_run(const Scenario& s) {
  s.validate();
  ScenarioResult out;
  out.name = s.name;
  out.kind = ScenarioKind::run;
  Checks checks(s, out);
  const auto grid = s.grid.build();
  const auto u0 = build_initial(grid, s.initial);

  auto setup = setup_from(s);
  setup.keep_states = checks.wants("contraction") || checks.wants("holder");
  setup.compute_dtu = checks.wants("dtu_monotone");
  setup.nash_order = checks.wants("extinction_bound") ? (s.grid.dim == 1 ? 1 : 2) : 0;
  std::vector<SimulationRun> runs;
  runs.push_back(simulate(u0, setup));
  auto& run = runs.front();
  out.runs.push_back(to_record("run", run));

  if (checks.wants("extinct") || checks.wants("no_extinction") ||
      checks.wants("extinction_bound") || checks.wants("t_v_matches_tc") ||
      checks.wants("h2_persistence") || checks.wants("mass_conserved")) {
    extinction_checks(s, out, checks, runs, {u0});
  }

  if (checks.wants("contraction")) {
    auto partner_spec = s.initial;
    partner_spec.seed += kPartnerSeedOffset;
    if (partner_spec.kind != InitialKind::random) {
      partner_spec.kind = InitialKind::random;
      partner_spec.regularity = 1;
    }
    auto partner_setup = setup;
    partner_setup.stop_on_extinction = false;
    auto primary_setup = setup;
    primary_setup.stop_on_extinction = false;
    const auto a = simulate(u0, primary_setup);
    const auto b = simulate(build_initial(grid, partner_spec), partner_setup);
    const double m0 = lp_integral(u0 - b.states.front().state, 2.0);
    const double worst = contraction_check(a.states, b.states);
    const double tol = kContractionTol * (1.0 + m0);
    checks.verdict("contraction", worst <= tol, worst, tol,
                   "largest increase of ||u - v||^2 between records");
  }

  if (checks.wants("holder")) {
    Trajectory coarse;
    for (std::size_t n = 0; n < run.states.size(); n += 2) coarse.push_back(run.states[n]);
    const double fine_ratio = holder_continuity_check(run.states);
    const double coarse_ratio = holder_continuity_check(coarse);
    out.constants["holder.fine"] = fine_ratio;
    out.constants["holder.coarse"] = coarse_ratio;
    const bool stable = std::isfinite(fine_ratio) &&
                        fine_ratio <= 2.0 * coarse_ratio + 1e-300 &&
                        coarse_ratio <= 2.0 * fine_ratio + 1e-300;
    checks.verdict("holder", stable, fine_ratio, {},
                   "Holder-1/2 quotient, stable within 2x under sample refinement");
  }

  if (checks.wants("dtu_monotone")) {
    const double worst = dtu_monotonicity_check(run.series);
    const double ratio = s.scheme.dt / 1e-3;
    const double tol = kDtuTolAtMilli * ratio * ratio;
    if (s.damping.regularized() && !s.nls.enabled) {
      checks.verdict("dtu_monotone", worst <= tol, worst, tol,
                     "largest increase of ||du/dt||_2 between records");
    } else {
      checks.report("dtu_monotone", worst, "not asserted outside the regularized flow");
    }
  }

  if (checks.wants("gn_ratio")) {
    const double ratio = gn_ratio_check(u0);
    checks.report("gn_ratio", ratio, "||u0||_inf / sqrt(||u0||_2 ||u0||_H1)");
  }

  common_run_checks(s, checks, runs);
  checks.finish();
  return out;
}

ScenarioResult run_scenario(const Scenario& s) {
  const auto start = std::chrono::steady_clock::now();
  ScenarioResult result;
  try {
    switch (s.kind) {
      case ScenarioKind::run: result = scenario_run(s); break;
      case ScenarioKind::extinction_1d: result = scenario_extinction_1d(s); break;
      case ScenarioKind::extinction_23d: result = scenario_extinction_23d(s); break;
      case ScenarioKind::regularized_sweep: result = scenario_regularized_sweep(s); break;
      case ScenarioKind::delta_convergence: result = scenario_delta_convergence(s); break;
      case ScenarioKind::gamma_sweep: result = scenario_gamma_sweep(s); break;
      case ScenarioKind::nls_corollary: result = scenario_nls_corollary(s); break;
      case ScenarioKind::nash_ensemble: result = scenario_nash_ensemble(s); break;
    }
  } catch (const std::exception& e) {
    result = ScenarioResult{};
    result.name = s.name;
    result.kind = s.kind;
    result.error = e.what();
    result.checks.push_back({"scenario_error", CheckStatus::fail, {}, {}, e.what()});
  }
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

SuiteResult run_suite(const std::vector<Scenario>& suite, ResultSink* sink,
                      int threads) {
  {
    std::set<std::string> names;
    for (const auto& s : suite) {
      if (!names.insert(s.name).second) {
        throw ConfigError("duplicate scenario name '" + s.name + "'");
      }
    }
  }
  SuiteResult result;
  result.entries.resize(suite.size());
  std::atomic<std::size_t> next{0};
  std::mutex sink_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < suite.size(); i = next++) {
      result.entries[i] = run_scenario(suite[i]);
      if (sink) {
        std::lock_guard lock(sink_mutex);
        sink->on_scenario(suite[i], result.entries[i]);
      }
    }
  };
  const auto count = static_cast<std::size_t>(std::max(1, threads));
  std::vector<std::jthread> pool;
  for (std::size_t t = 1; t < std::min(count, suite.size()); ++t) pool.emplace_back(worker);
  worker();
  pool.clear();
  return result;
}

}  // namespace sdnls
