#include "sdnls/random_field.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "sdnls/errors.hpp"
#include "sdnls/spectral.hpp"

namespace sdnls {

double default_decay(int dim, int regularity) { return 0.5 * dim + regularity; }

ComplexField random_field(GridPtr grid, const RandomFieldSpec& spec) {
  if (!(spec.amplitude >= 0.0)) throw ConfigError("amplitude must be >= 0");
  if (!(spec.band_fraction > 0.0)) throw ConfigError("band fraction must be > 0");
  std::mt19937_64 rng(spec.seed);
  // Phase from the top 53 bits; std::uniform_real_distribution is not
  // specified bit-for-bit across standard libraries.
  auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

  Spectrum s{grid, std::vector<Complex>(grid->size())};
  const auto& k2 = grid->wavenumber_sq();
  for (std::size_t flat = 0; flat < s.coeffs.size(); ++flat) {
    const double phase = 2.0 * std::numbers::pi * unit();
    const auto idx = grid->unflatten(flat);
    bool inside = true;
    for (int a = 0; a < grid->dim(); ++a) {
      const int m = grid->frequency_index(a, idx[a]);
      if (std::abs(m) > spec.band_fraction * grid->points()[a]) inside = false;
    }
    if (!inside) continue;
    s.coeffs[flat] = std::polar(std::pow(1.0 + k2[flat], -spec.decay), phase);
  }
  auto f = to_physical(s);
  const double peak = f.max_modulus();
  if (peak > 0.0) {
    for (auto& z : f.values) z *= spec.amplitude / peak;
  }
  return f;
}

}  // namespace sdnls
