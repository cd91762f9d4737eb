#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "sdnls/field.hpp"

namespace sdnls {

/// Coefficients of the damping term -i*gamma*u/(|u|^2 + delta)^(alpha/2).
/// delta == 0 is the unregularized equation. gamma == 0 switches damping off
/// (used for undamped control runs).
struct DampingParams {
  double gamma = 1.0;
  double alpha = 1.0;
  double delta = 0.0;

  void validate() const;
  bool regularized() const noexcept { return delta > 0.0; }
  bool operator==(const DampingParams&) const = default;
};

/// Conservative power nonlinearity lambda*|u|^(2 sigma)*u.
struct NlsParams {
  double lambda = 0.0;
  double sigma = 1.0;
  bool enabled = false;

  /// Rejects sigma <= 0 and the focusing case lambda < 0 with sigma >= 2.
  void validate() const;
  bool operator==(const NlsParams&) const = default;
};

enum class Splitting { lie, strang };

enum class SubstepPolicy { adaptive_rk, fixed_substeps };

struct StepScheme {
  double dt = 1e-3;
  Splitting splitting = Splitting::strang;
  SubstepPolicy substeps = SubstepPolicy::adaptive_rk;
  int fixed_substeps = 1;
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;

  void validate() const;
  bool operator==(const StepScheme&) const = default;
};

/// Closed-form flow of du/dt = -gamma*u/|u|^alpha, applied per cell:
/// |u|^alpha decreases linearly at rate alpha*gamma and is clamped at zero.
ComplexField damping_flow_exact(const ComplexField& f, const DampingParams& p,
                                double dt);

/// Flow of du/dt = -gamma*u/(|u|^2 + delta)^(alpha/2). The phase is kept;
/// log|u| is integrated per cell by the configured substep policy.
ComplexField damping_flow_regularized(const ComplexField& f,
                                      const DampingParams& p, double dt,
                                      const StepScheme& scheme);

/// Dispatches on p.delta.
ComplexField damping_flow(const ComplexField& f, const DampingParams& p,
                          double dt, const StepScheme& scheme);

/// Free Schrodinger propagator exp(i dt Laplacian); dt may be negative.
ComplexField linear_flow(const ComplexField& f, double dt);

/// u -> exp(-i lambda |u|^(2 sigma) dt) u. Moduli are untouched.
ComplexField phase_rotation_flow(const ComplexField& f, const NlsParams& q,
                                 double dt);

/// One step of the split scheme. Strang is the palindrome
/// D(dt/2) R(dt/2) L(dt) R(dt/2) D(dt/2) (rightmost applied first);
/// Lie is L(dt) after R(dt) after D(dt).
ComplexField strang_step(const ComplexField& f, const DampingParams& p,
                         const NlsParams& q, const StepScheme& scheme);

/// Relative extinction threshold for delta == 0 runs: a cell is zero once its
/// modulus is at most this times the initial max modulus.
inline constexpr double kExtinctionThresholdRel = 1e-13;

/// Cell modulus at or below which a field counts as zero. Regularized runs
/// never reach zero from positive data, so only exact zeros count there.
double extinction_threshold(const DampingParams& p, double initial_max_modulus);
bool is_extinct(const ComplexField& f, double threshold);

struct RunOptions {
  double t_max = 1.0;
  /// Recorder cadence in steps.
  int record_every = 1;
  bool stop_on_extinction = true;
};

struct SimulationResult {
  ComplexField final_state;
  std::int64_t steps = 0;
  double t_final = 0.0;
  bool extinct = false;
  /// First step time at which the field was extinct.
  std::optional<double> t_v;
  double threshold = 0.0;
};

using Recorder = std::function<void(double t, const ComplexField& state)>;

/// Advances by strang_step until t >= t_max or extinction. The recorder sees
/// t = 0, every record_every-th step, and the final state. Throws
/// NumericalBlowup if a non-finite value appears.
SimulationResult run_simulation(const ComplexField& u0, const DampingParams& p,
                                const NlsParams& q, const StepScheme& scheme,
                                const RunOptions& options,
                                const Recorder& recorder = {});

}  // namespace sdnls
