#include "twolayer/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "twolayer/errors.hpp"

namespace twolayer {

PeriodicGrid::PeriodicGrid(int n_, double period_, int mult) : n(n_), period(period_), k0_multiple(mult) {
  if (n < 16 || (n & (n - 1)) != 0) throw ConfigError("grid size must be a power of two and at least 16");
  if (!(period > 0)) throw ConfigError("grid period must be positive");
}

PeriodicGrid PeriodicGrid::around_carrier(int n, double k0, int multiple) {
  if (multiple < 1) throw ConfigError("k0_multiples must be at least 1");
  return PeriodicGrid(n, multiple * 2.0 * std::numbers::pi / k0, multiple);
}

double PeriodicGrid::wavenumber(int j) const { return 2.0 * std::numbers::pi * j / period; }

namespace {

struct Plans {
  fftw_plan r2c, c2r;
};

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

Plans get_plans(int n) {
  static std::map<int, Plans> cache;
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  double* in = fftw_alloc_real(n);
  fftw_complex* out = fftw_alloc_complex(n / 2 + 1);
  unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  Plans p{fftw_plan_dft_r2c_1d(n, in, out, flags), fftw_plan_dft_c2r_1d(n, out, in, flags | FFTW_DESTROY_INPUT)};
  fftw_free(in);
  fftw_free(out);
  cache[n] = p;
  return p;
}

}  // namespace

Fft::Fft(int n) : n_(n) {
  Plans p = get_plans(n);
  r2c_ = p.r2c;
  c2r_ = p.c2r;
}

Spectrum Fft::forward(const Field& f) const {
  if (static_cast<int>(f.size()) != n_) throw std::invalid_argument("Fft::forward: size mismatch");
  Field in(f);
  Spectrum out(n_ / 2 + 1);
  fftw_execute_dft_r2c(static_cast<fftw_plan>(r2c_), in.data(), reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

Field Fft::inverse(const Spectrum& s) const {
  if (static_cast<int>(s.size()) != n_ / 2 + 1) throw std::invalid_argument("Fft::inverse: size mismatch");
  Spectrum tmp(s);
  Field out(n_);
  fftw_execute_dft_c2r(static_cast<fftw_plan>(c2r_), reinterpret_cast<fftw_complex*>(tmp.data()), out.data());
  const double inv = 1.0 / n_;
  for (double& v : out) v *= inv;
  return out;
}

double symbol_abs(double k) { return std::abs(k); }
Matrix2 symbol_fbar(double k) { return eval_fbar(k); }

SpectralOps::SpectralOps(const PeriodicGrid& g) : grid_(g), fft_(g.n) {}

Spectrum SpectralOps::forward(const Field& f) const {
  Spectrum s = fft_.forward(f);
  s[grid_.n / 2] = 0.0;
  return s;
}

Spectrum SpectralOps::apply_spec(const Spectrum& s, const std::function<double(double)>& symbol) const {
  Spectrum r(s.size());
  for (int j = 0; j < grid_.n / 2; ++j) r[j] = s[j] * symbol(grid_.wavenumber(j));
  r[grid_.n / 2] = 0.0;
  return r;
}

Field SpectralOps::apply(const Field& f, const std::function<double(double)>& symbol) const {
  return inverse(apply_spec(forward(f), symbol));
}

Field SpectralOps::dx(const Field& f, int order) const {
  Spectrum s = forward(f);
  for (int j = 0; j < grid_.n / 2; ++j) s[j] *= std::pow(cplx(0.0, grid_.wavenumber(j)), order);
  return inverse(s);
}

void SpectralOps::apply2(const Field& a, const Field& b, const std::function<Matrix2(double)>& symbol,
                         Field& out_a, Field& out_b) const {
  Spectrum sa = forward(a), sb = forward(b);
  Spectrum ra(sa.size()), rb(sb.size());
  for (int j = 0; j < grid_.n / 2; ++j) {
    Matrix2 m = symbol(grid_.wavenumber(j));
    ra[j] = m.a11 * sa[j] + m.a12 * sb[j];
    rb[j] = m.a21 * sa[j] + m.a22 * sb[j];
  }
  out_a = inverse(ra);
  out_b = inverse(rb);
}

double SpectralOps::integral(const Field& f) const {
  double s = 0.0;
  for (double v : f) s += v;
  return s * grid_.dx();
}

double SpectralOps::inner(const Field& f, const Field& g) const {
  double s = 0.0;
  for (size_t i = 0; i < f.size(); ++i) s += f[i] * g[i];
  return s * grid_.dx();
}

Spectrum SpectralOps::refine_spec(const Spectrum& s, int factor) const {
  const int n = grid_.n, N = n * factor;
  Spectrum out(N / 2 + 1, 0.0);
  for (int j = 0; j < n / 2; ++j) out[j] = s[j] * static_cast<double>(factor);
  return out;
}

Field SpectralOps::refine(const Field& f, int factor) const {
  if (factor == 1) return inverse(forward(f));
  Fft fine(grid_.n * factor);
  return fine.inverse(refine_spec(forward(f), factor));
}

Field SpectralOps::coarsen(const Field& fine, int factor) const {
  const int n = grid_.n;
  if (static_cast<int>(fine.size()) != n * factor) throw std::invalid_argument("coarsen: size mismatch");
  Fft ff(n * factor);
  Spectrum S = ff.forward(fine);
  Spectrum s(n / 2 + 1, 0.0);
  for (int j = 0; j < n / 2; ++j) s[j] = S[j] / static_cast<double>(factor);
  return inverse(s);
}

double SpectralOps::sobolev_sq(const Field& f, int sob) const {
  Spectrum s = forward(f);
  const int n = grid_.n;
  double acc = 0.0;
  for (int j = 0; j < n / 2; ++j) {
    double w = std::pow(1.0 + grid_.wavenumber(j) * grid_.wavenumber(j), sob);
    acc += (j == 0 ? 1.0 : 2.0) * w * std::norm(s[j]);
  }
  return acc * grid_.period / (static_cast<double>(n) * n);
}

}  // namespace twolayer
