#include "sdnls/dynamics.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "sdnls/errors.hpp"
#include "sdnls/spectral.hpp"

namespace sdnls {

namespace odeint = boost::numeric::odeint;

void DampingParams::validate() const {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw ConfigError("gamma must be finite and >= 0");
  }
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw ConfigError("alpha must lie in (0, 1]");
  }
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw ConfigError("delta must be finite and >= 0");
  }
}

void NlsParams::validate() const {
  if (!enabled) return;
  if (!std::isfinite(lambda)) throw ConfigError("lambda must be finite");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ConfigError("sigma must be finite and > 0");
  }
  if (lambda < 0.0 && sigma >= 2.0) {
    throw ConfigError(
        "focusing nonlinearity (lambda < 0) requires sigma < 2 for extinction");
  }
}

void StepScheme::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be > 0");
  if (substeps == SubstepPolicy::fixed_substeps && fixed_substeps < 1) {
    throw ConfigError("fixed substep count must be >= 1");
  }
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
    throw ConfigError("substep tolerances must be > 0");
  }
}

ComplexField damping_flow_exact(const ComplexField& f, const DampingParams& p,
                                double dt) {
  ComplexField out(f.grid);
  const double drop = p.alpha * p.gamma * dt;
  const double inv_alpha = 1.0 / p.alpha;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Complex z = f.values[i];
    const double r = std::abs(z);
    if (r == 0.0) continue;
    const double r_alpha = p.alpha == 1.0 ? r : std::pow(r, p.alpha);
    const double remaining = r_alpha - drop;
    if (remaining <= 0.0) continue;
    const double r_new = p.alpha == 1.0 ? remaining : std::pow(remaining, inv_alpha);
    out.values[i] = z * (r_new / r);
  }
  return out;
}

namespace {

using LogState = std::array<double, 1>;

// d(log r)/dt = -gamma / (r^2 + delta)^(alpha/2)
struct LogModulusRhs {
  double gamma, half_alpha, delta;
  void operator()(const LogState& s, LogState& ds, double /*t*/) const {
    ds[0] = -gamma * std::pow(std::exp(2.0 * s[0]) + delta, -half_alpha);
  }
};

double advance_modulus(double r, const DampingParams& p, double dt,
                       const StepScheme& scheme, std::size_t cell) {
  const LogModulusRhs rhs{p.gamma, 0.5 * p.alpha, p.delta};
  LogState s{std::log(r)};
  try {
    if (scheme.substeps == SubstepPolicy::adaptive_rk) {
      auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<LogState>>(
          scheme.abs_tol, scheme.rel_tol);
      odeint::integrate_adaptive(stepper, rhs, s, 0.0, dt, dt);
    } else {
      odeint::runge_kutta4<LogState> stepper;
      const double h = dt / scheme.fixed_substeps;
      odeint::integrate_n_steps(stepper, rhs, s, 0.0, h, scheme.fixed_substeps);
    }
  } catch (const std::exception& e) {
    std::ostringstream msg;
    msg << "regularized damping substep failed at cell " << cell
        << " (modulus " << r << "): " << e.what();
    throw IntegrationError(msg.str());
  }
  const double r_new = std::exp(s[0]);
  if (!std::isfinite(r_new)) {
    std::ostringstream msg;
    msg << "regularized damping produced a non-finite modulus at cell " << cell
        << " (modulus " << r << ")";
    throw IntegrationError(msg.str());
  }
  return std::min(r_new, r);
}

}  // namespace

ComplexField damping_flow_regularized(const ComplexField& f,
                                      const DampingParams& p, double dt,
                                      const StepScheme& scheme) {
  if (!(p.delta > 0.0)) {
    throw ArgumentError("regularized damping flow needs delta > 0");
  }
  ComplexField out(f.grid);
  if (p.gamma == 0.0) return f;
  // Neighbouring cells with equal modulus share one integration.
  double last_r = -1.0;
  double last_factor = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Complex z = f.values[i];
    const double r = std::abs(z);
    if (r == 0.0) continue;
    if (r != last_r) {
      last_factor = advance_modulus(r, p, dt, scheme, i) / r;
      last_r = r;
    }
    out.values[i] = z * last_factor;
  }
  return out;
}

ComplexField damping_flow(const ComplexField& f, const DampingParams& p,
                          double dt, const StepScheme& scheme) {
  if (p.gamma == 0.0) return f;
  return p.regularized() ? damping_flow_regularized(f, p, dt, scheme)
                         : damping_flow_exact(f, p, dt);
}

ComplexField linear_flow(const ComplexField& f, double dt) {
  auto s = to_spectral(f);
  const auto& k2 = f.grid->wavenumber_sq();
  for (std::size_t i = 0; i < s.coeffs.size(); ++i) {
    s.coeffs[i] *= std::polar(1.0, -k2[i] * dt);
  }
  return to_physical(s);
}

ComplexField phase_rotation_flow(const ComplexField& f, const NlsParams& q,
                                 double dt) {
  ComplexField out(f.grid);
  if (!q.enabled || q.lambda == 0.0) {
    out.values = f.values;
    return out;
  }
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Complex z = f.values[i];
    const double power = std::pow(std::norm(z), q.sigma);  // |z|^(2 sigma)
    out.values[i] = z * std::polar(1.0, -q.lambda * power * dt);
  }
  return out;
}

ComplexField strang_step(const ComplexField& f, const DampingParams& p,
                         const NlsParams& q, const StepScheme& scheme) {
  const double dt = scheme.dt;
  const bool rotate = q.enabled && q.lambda != 0.0;
  if (scheme.splitting == Splitting::lie) {
    ComplexField u = damping_flow(f, p, dt, scheme);
    if (rotate) u = phase_rotation_flow(u, q, dt);
    return linear_flow(u, dt);
  }
  const double half = 0.5 * dt;
  ComplexField u = damping_flow(f, p, half, scheme);
  if (rotate) u = phase_rotation_flow(u, q, half);
  u = linear_flow(u, dt);
  if (rotate) u = phase_rotation_flow(u, q, half);
  return damping_flow(u, p, half, scheme);
}

double extinction_threshold(const DampingParams& p, double initial_max_modulus) {
  return p.regularized() ? 0.0 : kExtinctionThresholdRel * initial_max_modulus;
}

bool is_extinct(const ComplexField& f, double threshold) {
  for (const auto& z : f.values) {
    if (std::abs(z) > threshold) return false;
  }
  return true;
}

SimulationResult run_simulation(const ComplexField& u0, const DampingParams& p,
                                const NlsParams& q, const StepScheme& scheme,
                                const RunOptions& options,
                                const Recorder& recorder) {
  p.validate();
  q.validate();
  scheme.validate();
  if (!(options.t_max > 0.0)) throw ConfigError("t_max must be > 0");
  if (options.record_every < 1) throw ConfigError("record cadence must be >= 1");
  if (!u0.all_finite()) throw NumericalBlowup("initial data is not finite", 0.0);

  SimulationResult result;
  result.threshold = extinction_threshold(p, u0.max_modulus());
  result.final_state = u0;
  if (recorder) recorder(0.0, u0);

  if (is_extinct(u0, result.threshold)) {
    result.extinct = true;
    result.t_v = 0.0;
    return result;
  }

  // t is recomputed from the step count so it does not accumulate rounding.
  const auto max_steps =
      static_cast<std::int64_t>(std::ceil(options.t_max / scheme.dt - 1e-9));
  ComplexField u = u0;
  std::int64_t n = 0;
  bool recorded_last = true;
  while (n < max_steps) {
    u = strang_step(u, p, q, scheme);
    ++n;
    const double t = static_cast<double>(n) * scheme.dt;
    if (!u.all_finite()) {
      std::ostringstream msg;
      msg << "non-finite state at t = " << t;
      throw NumericalBlowup(msg.str(), t);
    }
    recorded_last = false;
    const bool extinct_now = is_extinct(u, result.threshold);
    if (extinct_now && !result.t_v) {
      result.t_v = t;
      result.extinct = true;
    } else if (!extinct_now) {
      result.extinct = false;
    }
    if (recorder && n % options.record_every == 0) {
      recorder(t, u);
      recorded_last = true;
    }
    if (extinct_now && options.stop_on_extinction) break;
  }
  result.steps = n;
  result.t_final = static_cast<double>(n) * scheme.dt;
  if (recorder && !recorded_last) recorder(result.t_final, u);
  result.final_state = std::move(u);
  return result;
}

}  // namespace sdnls
