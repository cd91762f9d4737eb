#pragma once

#include <span>

#include "sdnls/field.hpp"

namespace sdnls {

/// FFTW plans for one grid shape. Plans are built once; execution uses the
/// new-array interface so concurrent transforms on distinct buffers are safe.
class FftPlan {
 public:
  explicit FftPlan(const std::vector<int>& points);
  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  /// Unnormalized forward DFT (exp(-i k.x)).
  void forward(std::span<const Complex> in, std::span<Complex> out) const;
  /// Unnormalized backward DFT (exp(+i k.x)).
  void backward(std::span<const Complex> in, std::span<Complex> out) const;

 private:
  std::size_t size_;
  void* forward_plan_;
  void* backward_plan_;
};

/// Coefficients normalized so that a constant field c has a single zero-mode
/// coefficient equal to c.
Spectrum to_spectral(const ComplexField& f);
ComplexField to_physical(const Spectrum& s);

/// (sum |f|^p dV)^(1/p), rectangle rule. Throws ArgumentError for p < 1.
double lp_norm(const ComplexField& f, double p);
/// sum |f|^p dV without the outer root.
double lp_integral(const ComplexField& f, double p);
double linf_norm(const ComplexField& f);

/// (V sum_k (1 + |k|^2)^s |c_k|^2)^(1/2).
double sobolev_norm(const Spectrum& s, double order);
double sobolev_norm(const ComplexField& f, double order);
/// ||grad f||_{L^2} from the spectrum.
double gradient_norm(const Spectrum& s);

ComplexField laplacian_apply(const ComplexField& f);

}  // namespace sdnls
