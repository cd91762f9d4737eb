#include "sdnls/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "sdnls/errors.hpp"

namespace sdnls {

namespace {

// FFTW's planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }
fftw_complex* as_fftw(const Complex* p) {
  return reinterpret_cast<fftw_complex*>(const_cast<Complex*>(p));
}

void require_same_grid(const ComplexField& a, const ComplexField& b) {
  if (!a.grid || !b.grid || !(*a.grid == *b.grid) || a.size() != b.size()) {
    throw SizeMismatch("fields live on different grids");
  }
}

}  // namespace

// ---- ComplexField ---------------------------------------------------------

ComplexField::ComplexField(GridPtr g) : grid(std::move(g)) {
  values.assign(grid->size(), Complex{0.0, 0.0});
}

ComplexField::ComplexField(GridPtr g, std::vector<Complex> v)
    : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid->size()) {
    throw SizeMismatch("field has " + std::to_string(values.size()) +
                       " values, grid has " + std::to_string(grid->size()));
  }
}

double ComplexField::max_modulus() const noexcept {
  double m = 0.0;
  for (const auto& z : values) m = std::max(m, std::abs(z));
  return m;
}

bool ComplexField::all_finite() const noexcept {
  return std::all_of(values.begin(), values.end(), [](const Complex& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

ComplexField constant_field(GridPtr grid, Complex value) {
  ComplexField f(std::move(grid));
  std::fill(f.values.begin(), f.values.end(), value);
  return f;
}

ComplexField plane_wave(GridPtr grid, const std::vector<int>& modes,
                        Complex amplitude) {
  if (modes.size() != static_cast<std::size_t>(grid->dim())) {
    throw ArgumentError("plane wave needs one frequency index per axis");
  }
  ComplexField f(grid);
  for (std::size_t flat = 0; flat < f.size(); ++flat) {
    const auto idx = grid->unflatten(flat);
    double phase = 0.0;
    for (int a = 0; a < grid->dim(); ++a) {
      // Exact rational phase m*n/N avoids drift in 2*pi*m*x/L.
      phase += 2.0 * std::numbers::pi *
               static_cast<double>(static_cast<long>(modes[a]) * idx[a] %
                                   grid->points()[a]) /
               grid->points()[a];
    }
    f.values[flat] = amplitude * std::polar(1.0, phase);
  }
  return f;
}

ComplexField operator+(const ComplexField& a, const ComplexField& b) {
  require_same_grid(a, b);
  ComplexField out(a.grid);
  for (std::size_t i = 0; i < a.size(); ++i) out.values[i] = a.values[i] + b.values[i];
  return out;
}

ComplexField operator-(const ComplexField& a, const ComplexField& b) {
  require_same_grid(a, b);
  ComplexField out(a.grid);
  for (std::size_t i = 0; i < a.size(); ++i) out.values[i] = a.values[i] - b.values[i];
  return out;
}

ComplexField operator*(Complex c, const ComplexField& f) {
  ComplexField out(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) out.values[i] = c * f.values[i];
  return out;
}

// ---- FftPlan --------------------------------------------------------------

FftPlan::FftPlan(const std::vector<int>& points) {
  size_ = 1;
  for (int n : points) size_ *= static_cast<std::size_t>(n);
  std::vector<Complex> a(size_), b(size_);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard lock(planner_mutex());
  forward_plan_ = fftw_plan_dft(static_cast<int>(points.size()), points.data(),
                                as_fftw(a.data()), as_fftw(b.data()),
                                FFTW_FORWARD, flags);
  backward_plan_ = fftw_plan_dft(static_cast<int>(points.size()), points.data(),
                                 as_fftw(a.data()), as_fftw(b.data()),
                                 FFTW_BACKWARD, flags);
}

FftPlan::~FftPlan() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
}

void FftPlan::forward(std::span<const Complex> in, std::span<Complex> out) const {
  if (in.size() != size_ || out.size() != size_) {
    throw SizeMismatch("transform size does not match plan");
  }
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), as_fftw(in.data()),
                   as_fftw(out.data()));
}

void FftPlan::backward(std::span<const Complex> in, std::span<Complex> out) const {
  if (in.size() != size_ || out.size() != size_) {
    throw SizeMismatch("transform size does not match plan");
  }
  fftw_execute_dft(static_cast<fftw_plan>(backward_plan_), as_fftw(in.data()),
                   as_fftw(out.data()));
}

// ---- transforms -----------------------------------------------------------

Spectrum to_spectral(const ComplexField& f) {
  if (!f.grid || f.size() != f.grid->size()) {
    throw SizeMismatch("field size does not match its grid");
  }
  Spectrum s{f.grid, std::vector<Complex>(f.size())};
  f.grid->plan().forward(f.values, s.coeffs);
  const double scale = 1.0 / static_cast<double>(f.size());
  for (auto& c : s.coeffs) c *= scale;
  return s;
}

ComplexField to_physical(const Spectrum& s) {
  if (!s.grid || s.coeffs.size() != s.grid->size()) {
    throw SizeMismatch("spectrum size does not match its grid");
  }
  ComplexField f(s.grid);
  s.grid->plan().backward(s.coeffs, f.values);
  return f;
}

// ---- norms ----------------------------------------------------------------

double lp_integral(const ComplexField& f, double p) {
  if (!(p >= 1.0)) throw ArgumentError("L^p norm needs p >= 1");
  double sum = 0.0;
  if (p == 2.0) {
    for (const auto& z : f.values) sum += std::norm(z);
  } else {
    for (const auto& z : f.values) sum += std::pow(std::abs(z), p);
  }
  return sum * f.grid->cell_volume();
}

double lp_norm(const ComplexField& f, double p) {
  return std::pow(lp_integral(f, p), 1.0 / p);
}

double linf_norm(const ComplexField& f) { return f.max_modulus(); }

double sobolev_norm(const Spectrum& s, double order) {
  if (!(order >= 0.0)) throw ArgumentError("Sobolev order must be >= 0");
  const auto& k2 = s.grid->wavenumber_sq();
  double sum = 0.0;
  if (order == 0.0) {
    for (std::size_t i = 0; i < s.coeffs.size(); ++i) sum += std::norm(s.coeffs[i]);
  } else {
    for (std::size_t i = 0; i < s.coeffs.size(); ++i) {
      sum += std::pow(1.0 + k2[i], order) * std::norm(s.coeffs[i]);
    }
  }
  return std::sqrt(s.grid->volume() * sum);
}

double sobolev_norm(const ComplexField& f, double order) {
  return sobolev_norm(to_spectral(f), order);
}

double gradient_norm(const Spectrum& s) {
  const auto& k2 = s.grid->wavenumber_sq();
  double sum = 0.0;
  for (std::size_t i = 0; i < s.coeffs.size(); ++i) sum += k2[i] * std::norm(s.coeffs[i]);
  return std::sqrt(s.grid->volume() * sum);
}

ComplexField laplacian_apply(const ComplexField& f) {
  auto s = to_spectral(f);
  const auto& k2 = f.grid->wavenumber_sq();
  for (std::size_t i = 0; i < s.coeffs.size(); ++i) s.coeffs[i] *= -k2[i];
  return to_physical(s);
}

}  // namespace sdnls
