#include "sdnls/trajectory.hpp"

#include "sdnls/spectral.hpp"

namespace sdnls {

TimeSeriesRecord make_record(double t, const ComplexField& u,
                             const DampingParams& p, const NlsParams& q) {
  TimeSeriesRecord r;
  r.t = t;
  const auto spectrum = to_spectral(u);
  r.mass_sq = lp_integral(u, 2.0);
  r.l2ma_pow = dissipation_integral(u, p);
  r.h1 = sobolev_norm(spectrum, 1.0);
  r.h2 = sobolev_norm(spectrum, 2.0);
  r.linf = linf_norm(u);
  if (q.enabled) {
    const double grad = gradient_norm(spectrum);
    const double potential =
        q.lambda == 0.0 ? 0.0 : lp_integral(u, 2.0 * q.sigma + 2.0);
    r.nls_energy = grad * grad + q.lambda / (q.sigma + 1.0) * potential;
  }
  return r;
}

TrajectoryRecorder::TrajectoryRecorder(DampingParams p, NlsParams q,
                                       Options options)
    : damping_(p), nls_(q), options_(options) {}

void TrajectoryRecorder::record(double t, const ComplexField& u) {
  auto rec = make_record(t, u, damping_, nls_);
  if (!series_.empty()) {
    rec.mass_law_residual = mass_law_residual(series_.back(), rec, damping_.gamma);
  }
  if (options_.compute_dtu) {
    if (before_ && current_) {
      const double hm = current_->t - before_->t;
      const double hp = t - current_->t;
      // Three-point derivative at the middle sample, exact for quadratics.
      const double wp = hm / (hp * (hm + hp));
      const double wm = -hp / (hm * (hm + hp));
      const double wc = (hp - hm) / (hm * hp);
      ComplexField d(u.grid);
      for (std::size_t i = 0; i < u.size(); ++i) {
        d.values[i] = wp * u.values[i] + wc * current_->state.values[i] +
                      wm * before_->state.values[i];
      }
      series_.back().dtu_l2 = lp_norm(d, 2.0);
    }
    before_ = std::move(current_);
    current_ = Sample{t, u};
  }
  if (options_.keep_states) states_.push_back(Sample{t, u});
  series_.push_back(std::move(rec));
}

Recorder TrajectoryRecorder::callback() {
  return [this](double t, const ComplexField& u) { record(t, u); };
}

}  // namespace sdnls
