#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sdnls/errors.hpp"
#include "sdnls/random_field.hpp"
#include "sdnls/spectral.hpp"

using namespace sdnls;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ComplexField noise(GridPtr grid, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  ComplexField f(grid);
  for (auto& v : f.values) v = {g(rng), g(rng)};
  return f;
}

double rel_l2_error(const ComplexField& a, const ComplexField& b) {
  return lp_norm(a - b, 2.0) / lp_norm(b, 2.0);
}

// Direct O(N^2) transform of a 1-D field with the library's normalization.
std::vector<Complex> naive_coeffs(const ComplexField& f) {
  const std::size_t n = f.size();
  std::vector<Complex> c(n);
  for (std::size_t k = 0; k < n; ++k) {
    Complex sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      sum += f[j] * std::polar(1.0, -kTwoPi * double(k * j % n) / double(n));
    }
    c[k] = sum / double(n);
  }
  return c;
}

}  // namespace

TEST_CASE("grid construction") {
  auto g1 = make_grid(1, {8}, {kTwoPi});
  CHECK(g1->size() == 8);
  CHECK(g1->cell_volume() == doctest::Approx(kTwoPi / 8).epsilon(1e-15));

  auto g2 = make_grid(2, {4, 4}, {1.0, 1.0});
  CHECK(g2->size() == 16);
  CHECK(g2->cell_volume() == doctest::Approx(1.0 / 16).epsilon(1e-15));
  CHECK(g2->volume() == doctest::Approx(1.0));

  CHECK_THROWS_AS(make_grid(1, {7}, {1.0}), ConfigError);
  CHECK_THROWS_AS(make_grid(1, {2}, {1.0}), ConfigError);
  CHECK_THROWS_AS(make_grid(2, {8}, {1.0}), ConfigError);
  CHECK_THROWS_AS(make_grid(1, {8}, {0.0}), ConfigError);
  CHECK_THROWS_AS(make_grid(4, {4, 4, 4, 4}, {1, 1, 1, 1}), ConfigError);
}

TEST_CASE("frequency lattice is symmetric with Nyquist on the negative side") {
  auto g = make_grid(1, {8}, {kTwoPi});
  CHECK(g->frequency_index(0, 0) == 0);
  CHECK(g->frequency_index(0, 3) == 3);
  CHECK(g->frequency_index(0, 4) == -4);
  CHECK(g->frequency_index(0, 7) == -1);
  CHECK(g->wavenumber_sq()[4] == doctest::Approx(16.0));

  auto g3 = make_grid(3, {4, 6, 8}, {1.0, 2.0, 3.0});
  for (std::size_t i = 0; i < g3->size(); ++i) CHECK(g3->flatten(g3->unflatten(i)) == i);
  // flatten wraps negative indices
  CHECK(g3->flatten({-1, 0, 0}) == g3->flatten({3, 0, 0}));
}

TEST_CASE("transform matches a direct DFT") {
  auto g = make_grid(1, {16}, {3.0});
  const auto f = noise(g, 3);
  const auto spec = to_spectral(f);
  const auto ref = naive_coeffs(f);
  for (std::size_t k = 0; k < ref.size(); ++k) {
    CHECK(std::abs(spec.coeffs[k] - ref[k]) < 1e-14);
  }
}

TEST_CASE("constant fields live in the zero mode") {
  auto g = make_grid(2, {8, 8}, {1.0, 2.0});
  const auto spec = to_spectral(constant_field(g, 1.0));
  CHECK(std::abs(spec.coeffs[0] - Complex(1.0)) < 1e-15);
  for (std::size_t k = 1; k < spec.coeffs.size(); ++k) CHECK(std::abs(spec.coeffs[k]) < 1e-15);
}

TEST_CASE("plane waves are single modes") {
  auto g = make_grid(2, {8, 16}, {kTwoPi, 3.0});
  const auto f = plane_wave(g, {2, -3});
  const auto spec = to_spectral(f);
  const std::size_t target = g->flatten({2, -3, 0});
  for (std::size_t k = 0; k < spec.coeffs.size(); ++k) {
    const Complex expected = k == target ? 1.0 : 0.0;
    CHECK(std::abs(spec.coeffs[k] - expected) < 1e-14);
  }
}

TEST_CASE("round trip reproduces the field") {
  for (int d = 1; d <= 3; ++d) {
    auto g = d == 1 ? make_grid(1, {64}, {kTwoPi})
                    : d == 2 ? make_grid(2, {16, 8}, {1.0, 2.0})
                             : make_grid(3, {8, 4, 6}, {1.0, 1.0, 5.0});
    const auto f = noise(g, 10 + d);
    CHECK(rel_l2_error(to_physical(to_spectral(f)), f) < 1e-12);
  }
}

TEST_CASE("lp norm examples") {
  auto g = make_grid(2, {4, 4}, {1.0, 1.0});
  CHECK(lp_norm(constant_field(g, 2.0), 1.5) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(lp_norm(ComplexField(g), 3.0) == 0.0);
  CHECK_THROWS_AS(lp_norm(ComplexField(g), 0.5), ArgumentError);

  ComplexField spike(g);
  spike[5] = Complex(0.0, 3.0);
  CHECK(lp_norm(spike, 2.0) == doctest::Approx(3.0 * std::sqrt(1.0 / 16)).epsilon(1e-14));
}

TEST_CASE("sobolev norm examples") {
  auto g = make_grid(2, {8, 8}, {kTwoPi, 4.0});
  const double v = g->volume();
  const Complex c(1.5, -0.5);
  for (double s : {0.0, 1.0, 2.0, 3.5}) {
    CHECK(sobolev_norm(constant_field(g, c), s) ==
          doctest::Approx(std::abs(c) * std::sqrt(v)).epsilon(1e-13));
  }
  const auto wave = plane_wave(g, {1, 2});
  const double k2 = 1.0 + std::pow(kTwoPi * 2 / 4.0, 2);
  CHECK(sobolev_norm(wave, 1.0) == doctest::Approx(std::sqrt((1 + k2) * v)).epsilon(1e-13));
  CHECK(sobolev_norm(wave, 2.0) == doctest::Approx((1 + k2) * std::sqrt(v)).epsilon(1e-13));

  const auto f = noise(g, 5);
  CHECK(std::abs(sobolev_norm(f, 0.0) - lp_norm(f, 2.0)) < 1e-12 * lp_norm(f, 2.0));
  const double h1 = sobolev_norm(f, 1.0);
  const double grad = gradient_norm(to_spectral(f));
  CHECK(h1 * h1 == doctest::Approx(std::pow(lp_norm(f, 2.0), 2) + grad * grad).epsilon(1e-12));
}

TEST_CASE("laplacian examples") {
  auto g = make_grid(1, {32}, {kTwoPi});
  CHECK(linf_norm(laplacian_apply(constant_field(g, 3.0))) < 1e-13);

  const auto wave = plane_wave(g, {5});
  const auto lap = laplacian_apply(wave);
  CHECK(linf_norm(lap - Complex(-25.0) * wave) < 1e-11);

  const auto f = noise(g, 1), h = noise(g, 2);
  const Complex a(0.3, 1.1), b(-2.0, 0.5);
  const auto lhs = laplacian_apply(a * f + b * h);
  const auto rhs = a * laplacian_apply(f) + b * laplacian_apply(h);
  CHECK(lp_norm(lhs - rhs, 2.0) < 1e-12 * lp_norm(rhs, 2.0));
}

TEST_CASE("norm properties on random fields") {
  auto g = make_grid(2, {16, 16}, {kTwoPi, 3.0});
  const double vol = g->volume();
  for (unsigned seed = 0; seed < 20; ++seed) {
    const auto f = seed % 2 ? noise(g, seed)
                            : random_field(g, {.seed = seed, .decay = 2.0});
    const double l2 = lp_norm(f, 2.0);

    // Parseval
    const auto spec = to_spectral(f);
    double spectral_sq = 0.0;
    for (auto c : spec.coeffs) spectral_sq += std::norm(c);
    CHECK(std::abs(std::sqrt(vol * spectral_sq) - l2) < 1e-12 * l2);

    // monotone in s
    double previous = 0.0;
    for (double s : {0.0, 0.5, 1.0, 1.5, 2.0}) {
      const double hs = sobolev_norm(spec, s);
      CHECK(previous <= hs + 1e-12);
      previous = hs;
    }

    // homogeneity
    const Complex c(-1.7, 0.4);
    for (double p : {1.0, 1.5, 2.0, 4.0}) {
      CHECK(std::abs(lp_norm(c * f, p) - std::abs(c) * lp_norm(f, p)) < 1e-12 * std::abs(c) * lp_norm(f, p));
    }

    // Holder embedding L^2 into L^{2-alpha}
    for (double alpha : {0.25, 0.5, 1.0}) {
      const double bound = std::pow(vol, alpha / (2 * (2 - alpha))) * l2;
      CHECK(lp_norm(f, 2.0 - alpha) <= bound + 1e-10);
    }
  }
}

TEST_CASE("random fields are deterministic and scaled") {
  auto g = make_grid(1, {128}, {kTwoPi});
  const RandomFieldSpec spec{.seed = 42, .decay = 1.5, .amplitude = 2.5};
  const auto a = random_field(g, spec);
  const auto b = random_field(g, spec);
  CHECK(a.values == b.values);
  CHECK(a.max_modulus() == doctest::Approx(2.5).epsilon(1e-14));
  auto other = spec;
  other.seed = 43;
  CHECK(random_field(g, other).values != a.values);

  // nothing outside the band
  const auto coeffs = to_spectral(a).coeffs;
  for (int n = 0; n < 128; ++n) {
    if (std::abs(g->frequency_index(0, n)) > 32) CHECK(std::abs(coeffs[n]) < 1e-14);
  }
  CHECK(default_decay(1, 1) == 1.5);
  CHECK(default_decay(2, 2) == 3.0);
}
