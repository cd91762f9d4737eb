#pragma once

#include <cstdint>

#include "sdnls/field.hpp"

namespace sdnls {

/// Band-limited random data: Fourier coefficient magnitudes (1 + |k|^2)^(-decay)
/// with independent uniform phases, rescaled so that max |u| = amplitude.
struct RandomFieldSpec {
  std::uint64_t seed = 1;
  double decay = 1.5;
  double amplitude = 1.0;
  /// Modes with |m_j| > band_fraction * N_j on any axis are left empty.
  double band_fraction = 0.25;

  bool operator==(const RandomFieldSpec&) const = default;
};

/// Default decay for H^1-type (regularity 1) or H^2-type (regularity 2) data:
/// d/2 + regularity.
double default_decay(int dim, int regularity);

ComplexField random_field(GridPtr grid, const RandomFieldSpec& spec);

}  // namespace sdnls
