#pragma once

#include <complex>
#include <vector>

#include "sdnls/grid.hpp"

namespace sdnls {

using Complex = std::complex<double>;

/// Complex amplitude per grid cell, in physical space.
struct ComplexField {
  GridPtr grid;
  std::vector<Complex> values;

  ComplexField() = default;
  explicit ComplexField(GridPtr g);
  ComplexField(GridPtr g, std::vector<Complex> v);

  std::size_t size() const noexcept { return values.size(); }
  Complex& operator[](std::size_t i) { return values[i]; }
  const Complex& operator[](std::size_t i) const { return values[i]; }

  double max_modulus() const noexcept;
  bool all_finite() const noexcept;
};

/// Fourier coefficients c_k with f(x) = sum_k c_k exp(i k.x).
struct Spectrum {
  GridPtr grid;
  std::vector<Complex> coeffs;
};

ComplexField constant_field(GridPtr grid, Complex value);
/// exp(i k.x) with integer frequency indices (m_1, ..., m_d).
ComplexField plane_wave(GridPtr grid, const std::vector<int>& modes,
                        Complex amplitude = 1.0);

ComplexField operator+(const ComplexField& a, const ComplexField& b);
ComplexField operator-(const ComplexField& a, const ComplexField& b);
ComplexField operator*(Complex c, const ComplexField& f);

}  // namespace sdnls
