#pragma once

#include <optional>
#include <span>
#include <vector>

#include "sdnls/dynamics.hpp"
#include "sdnls/field.hpp"

namespace sdnls {

/// Per-sample diagnostics of a trajectory.
struct TimeSeriesRecord {
  double t = 0.0;
  double mass_sq = 0.0;   ///< ||u||_{L^2}^2
  /// Dissipation density integral: int |u|^2/(|u|^2+delta)^(alpha/2), which is
  /// ||u||_{L^{2-alpha}}^{2-alpha} when delta = 0.
  double l2ma_pow = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;
  double linf = 0.0;
  /// Mass-law residual over the interval ending at this sample (0 for the first).
  double mass_law_residual = 0.0;
  std::optional<double> dtu_l2;
  std::optional<double> nls_energy;

  bool operator==(const TimeSeriesRecord&) const = default;
};

using TimeSeries = std::vector<TimeSeriesRecord>;

struct ExtinctionReport {
  bool extinct = false;
  std::optional<double> t_v;
  /// Max modulus of the final state.
  double mass_at_end = 0.0;
  std::optional<double> bound_1d;
  std::optional<double> bound_23d;
  double nash_constant_estimate = 0.0;

  bool operator==(const ExtinctionReport&) const = default;
};

struct OdeState {
  double y = 0.0;  ///< squared modulus
  double t = 0.0;
};

// ---- scalar ODE oracles ---------------------------------------------------

/// max(y0^(alpha/2) - alpha*gamma*t, 0)^(2/alpha), the exact solution of
/// dy/dt = -2 gamma y^(1 - alpha/2).
double ode_oracle_exact(double y0, double alpha, double gamma, double t);

/// Extinction time |u0|^alpha / (alpha gamma) of the scalar ODE.
double ode_oracle_tc(double u0_mod, double alpha, double gamma);

/// Solution of dy/dt = -2 gamma y / (y + delta)^(alpha/2), found by inverting
/// the elapsed-time integral t(y) = int_y^{y0} (eta+delta)^(alpha/2)/(2 gamma eta)
/// with Gauss-Kronrod quadrature and Newton iteration in log y.
double ode_oracle_regularized(double y0, double alpha, double gamma,
                              double delta, double t);
OdeState ode_oracle_regularized(const OdeState& start, double alpha,
                                double gamma, double delta, double dt);

// ---- dissipation identities ---------------------------------------------

/// int |u|^2 / (|u|^2 + delta)^(alpha/2) dx.
double dissipation_integral(const ComplexField& f, const DampingParams& p);

/// |(m2 - m1)/(t2 - t1) + 2 gamma (P1 + P2)/2| / (1 + m1).
double mass_law_residual(const TimeSeriesRecord& first,
                         const TimeSeriesRecord& second, double gamma);

struct Sample {
  double t = 0.0;
  ComplexField state;
};
using Trajectory = std::vector<Sample>;

/// Largest increase of ||uA - uB||^2 between consecutive common samples.
double contraction_check(const Trajectory& a, const Trajectory& b);

/// Re((z1/|z1|^alpha - z2/|z2|^alpha) * conj(z1 - z2)), with z/|z|^alpha := 0
/// at z = 0.
double pointwise_monotonicity(Complex z1, Complex z2, double alpha);

// ---- inequalities --------------------------------------------------------

/// ||f||_2^(alpha d + 2 s (2-alpha)) / ((||f||_{2-alpha}^{2-alpha})^(2s) ||f||_{H^s}^(alpha d)).
/// Degree-0 homogeneous in amplitude. Throws ArgumentError for a zero field.
double nash_ratio(const ComplexField& f, double alpha, int order);

/// ||f||_inf / sqrt(||f||_2 ||f||_{H^1}) on a 1-D grid.
double gn_ratio_check(const ComplexField& f);

/// Norms of the initial datum that enter the extinction bounds.
struct InitialNorms {
  double l2 = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;
};

/// Upper bound on the extinction time in d = 1, obtained by integrating the
/// mass law with the s = 1 Nash inequality:
/// 2 sqrt(K) ||u0||_2^(alpha/2) H1^(alpha/2) / (alpha gamma), where K is the
/// Nash constant and H1 bounds ||u(t)||_{H^1}.
double extinction_bound_1d(double l2_0, double h1_sup, double nash_constant,
                           double gamma, double alpha);

/// d = 2, 3 analogue from the s = 2 inequality with beta = (1 - d/4) alpha:
/// K^(1/4) H2^(alpha d/4) ||u0||_2^beta / (beta gamma).
double extinction_bound_23d(double l2_0, double h2_sup, double nash_constant,
                            double gamma, double alpha, int dim);

/// Fills the bound appropriate for `dim` into the report and returns whether
/// t_v does not exceed it. Throws ArgumentError if the report is not extinct.
/// `sobolev_sup` is the H^1 (d = 1) or H^2 (d = 2, 3) bound along the run.
bool extinction_bound_check(ExtinctionReport& report, const InitialNorms& u0,
                            double sobolev_sup, double gamma, double alpha,
                            int dim, double nash_constant);

// ---- trajectory diagnostics ---------------------------------------------

/// max over sample pairs of ||u(t) - u(t')||_2 / |t - t'|^(1/2).
double holder_continuity_check(const Trajectory& samples);

struct H2Persistence {
  bool bounded = false;
  double sup_h2 = 0.0;
  /// sup_h2 / ||u0||_{H^2}, the empirical constant.
  double constant = 0.0;
  double first_quarter_max = 0.0;
  double last_quarter_max = 0.0;
};

/// Checks for a finite H^2 supremum with no upward trend over the records
/// before extinction (last-quarter max <= 1.05 * first-quarter max).
H2Persistence h2_persistence_check(const TimeSeries& series, double u0_h2,
                                   std::optional<double> t_v = std::nullopt);

/// Largest increase of the recorded ||du/dt||_2 between consecutive samples.
/// Throws ArgumentError if fewer than two dtu values are present.
double dtu_monotonicity_check(const TimeSeries& series);

/// ||grad u||_2^2 + lambda/(sigma+1) ||u||_{2 sigma + 2}^{2 sigma + 2}.
double nls_energy(const ComplexField& f, const NlsParams& q);

/// Least-squares slope of log(mass_sq) against t over the samples whose mass
/// lies in [lo, hi] times the initial mass. nullopt if fewer than 3 qualify.
std::optional<double> fit_log_mass_slope(const TimeSeries& series, double lo,
                                         double hi);

/// Observed convergence order log2(e(h) / e(h/2)) for successive pairs.
std::vector<double> convergence_orders(std::span<const double> errors);

}  // namespace sdnls
