#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "twolayer/dispersion.hpp"

namespace twolayer {

using cplx = std::complex<double>;
using Field = std::vector<double>;
using Spectrum = std::vector<cplx>;  // n/2 + 1 non-negative wavenumbers, unnormalised DFT

// Uniform periodic grid.  Sample i sits at x = (i - n/2) * dx so that x = 0 is a
// grid point in the middle of the window.
struct PeriodicGrid {
  int n = 0;
  double period = 0;
  int k0_multiple = 0;  // 0 when the grid was not built around a carrier

  PeriodicGrid() = default;
  PeriodicGrid(int n, double period, int k0_multiple = 0);
  static PeriodicGrid around_carrier(int n, double k0, int multiple);

  double dx() const { return period / n; }
  double x(int i) const { return (i - n / 2) * dx(); }
  double wavenumber(int j) const;
  PeriodicGrid refined(int factor) const { return PeriodicGrid(n * factor, period, k0_multiple); }
};

// FFTW-backed transforms of one size.  Plans are shared and created under a lock;
// execution uses the new-array interface so concurrent calls are safe.
class Fft {
 public:
  explicit Fft(int n);
  int size() const { return n_; }
  Spectrum forward(const Field& f) const;
  Field inverse(const Spectrum& s) const;  // includes the 1/n factor

 private:
  int n_;
  void* r2c_;
  void* c2r_;
};

// Spectral operators on a grid; the Nyquist coefficient is always discarded so
// that differentiation is exactly skew-adjoint.
class SpectralOps {
 public:
  explicit SpectralOps(const PeriodicGrid& g);
  const PeriodicGrid& grid() const { return grid_; }
  int n() const { return grid_.n; }

  Spectrum forward(const Field& f) const;
  Field inverse(const Spectrum& s) const { return fft_.inverse(s); }

  Field apply(const Field& f, const std::function<double(double)>& symbol) const;
  Spectrum apply_spec(const Spectrum& s, const std::function<double(double)>& symbol) const;
  Field dx(const Field& f, int order = 1) const;

  // Pair multiplier with a 2x2 symbol (first component = interface).
  void apply2(const Field& a, const Field& b, const std::function<Matrix2(double)>& symbol,
              Field& out_a, Field& out_b) const;

  double integral(const Field& f) const;
  double inner(const Field& f, const Field& g) const;

  // Band-limited interpolation onto a grid `factor` times finer, and the adjoint-like
  // projection back (keeps the coarse band, drops the coarse Nyquist).
  Field refine(const Field& f, int factor) const;
  Spectrum refine_spec(const Spectrum& s, int factor) const;
  Field coarsen(const Field& fine, int factor) const;

  // Squared Sobolev norm sum_j (1+k^2)^s |f_j|^2 with the integral normalisation.
  double sobolev_sq(const Field& f, int s) const;

 private:
  PeriodicGrid grid_;
  Fft fft_;
};

double symbol_abs(double k);
Matrix2 symbol_fbar(double k);

}  // namespace twolayer
