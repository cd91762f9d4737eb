#pragma once

#include "sdnls/analysis.hpp"

namespace sdnls {

/// Norms of one state; residual and du/dt are left for the recorder.
TimeSeriesRecord make_record(double t, const ComplexField& u,
                             const DampingParams& p, const NlsParams& q);

/// Turns the states handed out by run_simulation into a TimeSeries.
///
/// ||du/dt||_2 at a sample is the three-point difference of its neighbours,
/// so it is filled one sample late and stays absent at both ends.
class TrajectoryRecorder {
 public:
  struct Options {
    bool keep_states = false;
    bool compute_dtu = false;
  };

  TrajectoryRecorder(DampingParams p, NlsParams q, Options options);

  void record(double t, const ComplexField& u);
  Recorder callback();

  const TimeSeries& series() const noexcept { return series_; }
  TimeSeries take_series() { return std::move(series_); }
  const Trajectory& states() const noexcept { return states_; }

 private:
  DampingParams damping_;
  NlsParams nls_;
  Options options_;
  TimeSeries series_;
  Trajectory states_;
  // Last two states, for the du/dt stencil.
  std::optional<Sample> before_;
  std::optional<Sample> current_;
};

}  // namespace sdnls
