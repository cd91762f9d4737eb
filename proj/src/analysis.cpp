#include "sdnls/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "sdnls/errors.hpp"
#include "sdnls/spectral.hpp"

namespace sdnls {

double ode_oracle_exact(double y0, double alpha, double gamma, double t) {
  if (y0 < 0.0 || t < 0.0) throw ArgumentError("ode oracle needs y0, t >= 0");
  const double base = std::pow(y0, 0.5 * alpha) - alpha * gamma * t;
  return base > 0.0 ? std::pow(base, 2.0 / alpha) : 0.0;
}

double ode_oracle_tc(double u0_mod, double alpha, double gamma) {
  if (u0_mod < 0.0) throw ArgumentError("modulus must be >= 0");
  return std::pow(u0_mod, alpha) / (alpha * gamma);
}

namespace {

// Time needed to go from log y = w to log y = w0 (w <= w0):
// int_w^{w0} (exp(v) + delta)^(alpha/2) / (2 gamma) dv.
class ElapsedTime {
 public:
  ElapsedTime(double w0, double alpha, double gamma, double delta)
      : w0_(w0), half_alpha_(0.5 * alpha), gamma_(gamma), delta_(delta),
        knee_(std::log(delta)) {}

  double density(double v) const {
    return std::pow(std::exp(v) + delta_, half_alpha_) / (2.0 * gamma_);
  }

  double operator()(double w) const {
    if (w >= w0_) return 0.0;
    // The integrand is flat below log(delta) and grows like exp(alpha v / 2)
    // above it; splitting there keeps each panel smooth.
    if (knee_ > w && knee_ < w0_) return integrate(w, knee_) + integrate(knee_, w0_);
    return integrate(w, w0_);
  }

 private:
  double integrate(double a, double b) const {
    using boost::math::quadrature::gauss_kronrod;
    double err = 0.0;
    return gauss_kronrod<double, 31>::integrate(
        [this](double v) { return density(v); }, a, b, 12, 1e-13, &err);
  }

  double w0_, half_alpha_, gamma_, delta_, knee_;
};

}  // namespace

double ode_oracle_regularized(double y0, double alpha, double gamma,
                              double delta, double t) {
  if (y0 < 0.0 || t < 0.0) throw ArgumentError("ode oracle needs y0, t >= 0");
  if (!(delta > 0.0)) throw ArgumentError("regularized oracle needs delta > 0");
  if (y0 == 0.0 || t == 0.0 || gamma == 0.0) return y0;

  const double w0 = std::log(y0);
  const ElapsedTime elapsed(w0, alpha, gamma, delta);
  // The density is increasing in v, bracketing the root between the slowest
  // and fastest possible decay.
  const double hi = w0 - t / elapsed.density(w0);
  const double lo = w0 - 2.0 * gamma * t / std::pow(delta, 0.5 * alpha);
  if (hi <= lo) return std::exp(hi);

  auto residual = [&](double w) {
    return std::make_pair(elapsed(w) - t, -elapsed.density(w));
  };
  std::uintmax_t iterations = 200;
  const double w = boost::math::tools::newton_raphson_iterate(
      residual, 0.5 * (lo + hi), lo, hi, std::numeric_limits<double>::digits - 4,
      iterations);
  if (iterations >= 200 || !std::isfinite(w)) {
    throw IntegrationError("regularized ODE oracle did not converge");
  }
  return std::exp(w);
}

OdeState ode_oracle_regularized(const OdeState& start, double alpha,
                                double gamma, double delta, double dt) {
  return {ode_oracle_regularized(start.y, alpha, gamma, delta, dt), start.t + dt};
}

double dissipation_integral(const ComplexField& f, const DampingParams& p) {
  if (p.delta == 0.0) return lp_integral(f, 2.0 - p.alpha);
  double sum = 0.0;
  for (const auto& z : f.values) {
    const double y = std::norm(z);
    sum += y / std::pow(y + p.delta, 0.5 * p.alpha);
  }
  return sum * f.grid->cell_volume();
}

double mass_law_residual(const TimeSeriesRecord& first,
                         const TimeSeriesRecord& second, double gamma) {
  const double span = second.t - first.t;
  if (!(span > 0.0)) throw ArgumentError("records must be strictly increasing in t");
  const double rate = (second.mass_sq - first.mass_sq) / span;
  const double dissipation = gamma * (first.l2ma_pow + second.l2ma_pow);
  return std::abs(rate + dissipation) / (1.0 + first.mass_sq);
}

double contraction_check(const Trajectory& a, const Trajectory& b) {
  if (a.size() != b.size()) throw ArgumentError("trajectories differ in length");
  double worst = -std::numeric_limits<double>::infinity();
  double previous = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) {
    if (!a[n].state.grid || !b[n].state.grid ||
        !(*a[n].state.grid == *b[n].state.grid)) {
      throw ArgumentError("trajectories live on different grids");
    }
    if (a[n].t != b[n].t) throw ArgumentError("trajectories sampled at different times");
    const double m = lp_integral(a[n].state - b[n].state, 2.0);
    if (n > 0) worst = std::max(worst, m - previous);
    previous = m;
  }
  return a.size() < 2 ? 0.0 : worst;
}

double pointwise_monotonicity(Complex z1, Complex z2, double alpha) {
  auto damp = [alpha](Complex z) {
    const double r = std::abs(z);
    return r == 0.0 ? Complex{} : z / std::pow(r, alpha);
  };
  return std::real((damp(z1) - damp(z2)) * std::conj(z1 - z2));
}

double nash_ratio(const ComplexField& f, double alpha, int order) {
  if (order < 1) throw ArgumentError("Nash ratio order must be >= 1");
  const auto spectrum = to_spectral(f);
  const double l2 = sobolev_norm(spectrum, 0.0);
  if (!(l2 > 0.0)) throw ArgumentError("Nash ratio undefined for the zero field");
  const double hs = sobolev_norm(spectrum, order);
  const double p = lp_integral(f, 2.0 - alpha);
  const double d = f.grid->dim();
  const double s = order;
  // Evaluated in logs: the powers of individual norms overflow easily.
  const double log_ratio = (alpha * d + 2.0 * s * (2.0 - alpha)) * std::log(l2) -
                           2.0 * s * std::log(p) - alpha * d * std::log(hs);
  return std::exp(log_ratio);
}

double gn_ratio_check(const ComplexField& f) {
  if (f.grid->dim() != 1) throw ArgumentError("Gagliardo-Nirenberg check is 1-D only");
  const auto spectrum = to_spectral(f);
  const double l2 = sobolev_norm(spectrum, 0.0);
  if (!(l2 > 0.0)) throw ArgumentError("GN ratio undefined for the zero field");
  return linf_norm(f) / std::sqrt(l2 * sobolev_norm(spectrum, 1.0));
}

double extinction_bound_1d(double l2_0, double h1_sup, double nash_constant,
                           double gamma, double alpha) {
  return 2.0 * std::sqrt(nash_constant) * std::pow(l2_0, 0.5 * alpha) *
         std::pow(h1_sup, 0.5 * alpha) / (alpha * gamma);
}

double extinction_bound_23d(double l2_0, double h2_sup, double nash_constant,
                            double gamma, double alpha, int dim) {
  const double beta = (1.0 - dim / 4.0) * alpha;
  return std::pow(nash_constant, 0.25) * std::pow(h2_sup, alpha * dim / 4.0) *
         std::pow(l2_0, beta) / (beta * gamma);
}

bool extinction_bound_check(ExtinctionReport& report, const InitialNorms& u0,
                            double sobolev_sup, double gamma, double alpha,
                            int dim, double nash_constant) {
  if (!report.extinct || !report.t_v) {
    throw ArgumentError("extinction bound check needs an extinct run");
  }
  report.nash_constant_estimate = nash_constant;
  double bound = 0.0;
  if (dim == 1) {
    bound = extinction_bound_1d(u0.l2, std::max(sobolev_sup, u0.h1),
                                nash_constant, gamma, alpha);
    report.bound_1d = bound;
  } else {
    bound = extinction_bound_23d(u0.l2, std::max(sobolev_sup, u0.h2),
                                 nash_constant, gamma, alpha, dim);
    report.bound_23d = bound;
  }
  return *report.t_v <= bound;
}

double holder_continuity_check(const Trajectory& samples) {
  double worst = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = i + 1; j < samples.size(); ++j) {
      const double gap = std::abs(samples[j].t - samples[i].t);
      if (gap == 0.0) continue;
      const double dist = lp_norm(samples[j].state - samples[i].state, 2.0);
      worst = std::max(worst, dist / std::sqrt(gap));
    }
  }
  return worst;
}

H2Persistence h2_persistence_check(const TimeSeries& series, double u0_h2,
                                   std::optional<double> t_v) {
  H2Persistence out;
  std::vector<double> values;
  for (const auto& r : series) {
    if (t_v && r.t >= *t_v) break;
    values.push_back(r.h2);
  }
  if (values.empty()) {
    out.bounded = true;
    return out;
  }
  out.sup_h2 = *std::max_element(values.begin(), values.end());
  out.constant = u0_h2 > 0.0 ? out.sup_h2 / u0_h2 : 0.0;
  const std::size_t quarter = std::max<std::size_t>(1, values.size() / 4);
  out.first_quarter_max =
      *std::max_element(values.begin(), values.begin() + quarter);
  out.last_quarter_max = *std::max_element(values.end() - quarter, values.end());
  out.bounded = std::isfinite(out.sup_h2) &&
                out.last_quarter_max <= out.first_quarter_max * 1.05;
  return out;
}

double dtu_monotonicity_check(const TimeSeries& series) {
  double worst = -std::numeric_limits<double>::infinity();
  std::optional<double> previous;
  int count = 0;
  for (const auto& r : series) {
    if (!r.dtu_l2) continue;
    ++count;
    if (previous) worst = std::max(worst, *r.dtu_l2 - *previous);
    previous = r.dtu_l2;
  }
  if (count < 2) throw ArgumentError("series has fewer than two du/dt samples");
  return worst;
}

double nls_energy(const ComplexField& f, const NlsParams& q) {
  const double grad = gradient_norm(to_spectral(f));
  const double potential =
      q.lambda == 0.0 ? 0.0 : lp_integral(f, 2.0 * q.sigma + 2.0);
  return grad * grad + q.lambda / (q.sigma + 1.0) * potential;
}

std::optional<double> fit_log_mass_slope(const TimeSeries& series, double lo,
                                         double hi) {
  if (series.empty() || !(series.front().mass_sq > 0.0)) return std::nullopt;
  const double m0 = series.front().mass_sq;
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  int n = 0;
  for (const auto& r : series) {
    if (r.mass_sq < lo * m0 || r.mass_sq > hi * m0 || !(r.mass_sq > 0.0)) continue;
    const double y = std::log(r.mass_sq);
    st += r.t;
    sy += y;
    stt += r.t * r.t;
    sty += r.t * y;
    ++n;
  }
  if (n < 3) return std::nullopt;
  const double denom = n * stt - st * st;
  if (!(denom > 0.0)) return std::nullopt;
  return (n * sty - st * sy) / denom;
}

std::vector<double> convergence_orders(std::span<const double> errors) {
  std::vector<double> orders;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
    orders.push_back(std::log2(errors[i] / errors[i + 1]));
  }
  return orders;
}

}  // namespace sdnls
