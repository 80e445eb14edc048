#include "twolayer/nls.hpp"

#include <cmath>

#include "twolayer/errors.hpp"

namespace twolayer {

namespace a3_blocks {

double c1(double k0, double a) {
  Matrix2 F = eval_fbar(k0);
  return F.a11 - a * F.a12;
}

double c2(double k0, double a) {
  Matrix2 F = eval_fbar(k0);
  return F.a21 - a * F.a22;
}

Vec2 harmonic_diag(const Params& p, const CriticalPoint& c) {
  const double k0 = c.k0, a = c.a, s = p.rho * c.nu0 * c.nu0;
  Matrix2 F2 = eval_fbar(2 * k0);
  double u = c1(k0, a), w = c2(k0, a);
  return {s * (1.5 * k0 * k0 - 0.5 * u * u - F2.a11 * u),
          s * (-1.5 * k0 * k0 * a * a + 0.5 * w * w - a * F2.a22 * w)};
}

Vec2 harmonic_cross(const Params& p, const CriticalPoint& c) {
  const double k0 = c.k0, a = c.a, s = p.rho * c.nu0 * c.nu0;
  Matrix2 F2 = eval_fbar(2 * k0);
  double u = c1(k0, a), w = c2(k0, a);
  return {s * (-a * F2.a21 * w), s * (-F2.a12 * u)};
}

Vec2 harmonic_lower(const CriticalPoint& c) { return {c.nu0 * c.nu0 * c.k0 * c.k0, 0.0}; }

Vec2 mean_diag(const Params& p, const CriticalPoint& c) {
  const double k0 = c.k0, a = c.a, s = p.rho * c.nu0 * c.nu0;
  Matrix2 F0 = eval_fbar(0.0);
  double u = c1(k0, a), w = c2(k0, a);
  return {s * (0.5 * k0 * k0 - 0.5 * u * u - F0.a11 * u),
          s * (-0.5 * k0 * k0 * a * a + 0.5 * w * w - a * F0.a22 * w)};
}

Vec2 mean_cross(const Params& p, const CriticalPoint& c) {
  const double k0 = c.k0, a = c.a, s = p.rho * c.nu0 * c.nu0;
  Matrix2 F0 = eval_fbar(0.0);
  double u = c1(k0, a), w = c2(k0, a);
  return {s * (-a * F0.a21 * w), s * (-F0.a12 * u)};
}

}  // namespace a3_blocks

A3Terms compute_a3(const Params& p, const CriticalPoint& c) {
  using namespace a3_blocks;
  Vec2 h1 = harmonic_diag(p, c), h2 = harmonic_cross(p, c), h3 = harmonic_lower(c);
  Vec2 m1 = mean_diag(p, c), m2 = mean_cross(p, c);
  Vec2 v1{h1[0] + h2[0] + h3[0], h1[1] + h2[1] + h3[1]};
  Vec2 v2{m1[0] + m2[0], m1[1] + m2[1]};
  Matrix2 g2 = eval_g(2 * c.k0, p, c.nu0);
  Matrix2 g0 = eval_g0(p, c.nu0);
  if (g2.condition_symmetric() > 1e12) throw RegimeError("g(2k0) is numerically singular (second-harmonic resonance)");
  if (g0.condition_symmetric() > 1e12) throw RegimeError("g(0) is numerically singular (long-wave resonance)");
  double a3 = -g2.inverse().quad(v1) / 3.0 - 2.0 * g0.inverse().quad(v2) / 3.0;
  return {a3, v1, v2};
}

A4Terms compute_a4(const Params& p, const CriticalPoint& c) {
  const double k0 = c.k0, a = c.a;
  double a41 = -0.125 * (p.beta_under + p.rho * p.beta_over * std::pow(a, 4)) * std::pow(k0, 4);
  double under = -std::pow(k0, 3) / 6.0;
  Matrix2 F0 = eval_fbar(0.0), F2 = eval_fbar(2 * k0);
  double u = a3_blocks::c1(k0, a), w = a3_blocks::c2(k0, a);
  double over = -0.5 * (u - a * a * a * w) * k0 * k0
                + u * u * (2 * F0.a11 + F2.a11) / 6.0
                + a * a * w * w * (2 * F0.a22 + F2.a22) / 6.0
                + a * u * w * (2 * F0.a21 + F2.a21) / 3.0;
  double a42 = under + p.rho * over;
  return {a41 - c.nu0 * c.nu0 * a42, a41, a42, under, over};
}

bool check_focusing(double a3, double a4) { return 0.5 * a3 + a4 < 0.0; }

double eval_alpha(const Params& p, const CriticalPoint& c) {
  return 2.0 / (c.nu0 * c.k0 + c.nu0 * p.rho * eval_fbar(c.k0).quad(c.v0()));
}

NlsCoefficients compute_nls(const Params& p, const CriticalPoint& c) {
  NlsCoefficients r;
  r.a2 = c.a2;
  auto t3 = compute_a3(p, c);
  auto t4 = compute_a4(p, c);
  r.a3 = t3.a3;
  r.a3_vec1 = t3.vec1;
  r.a3_vec2 = t3.vec2;
  r.a4 = t4.a4;
  r.a4_1 = t4.a4_1;
  r.a4_2 = t4.a4_2;
  r.alpha = eval_alpha(p, c);
  r.focusing = check_focusing(r.a3, r.a4);
  double cc = r.cubic();
  r.nu_nls = -9.0 * r.alpha * r.alpha * cc * cc / (8.0 * r.a2);
  r.i_nls = -3.0 * std::pow(r.alpha, 3) * cc * cc / (4.0 * r.a2);
  return r;
}

double SolitonProfile::value(double s) const { return amplitude / std::cosh(decay_rate * s); }

double SolitonProfile::d1(double s) const {
  double z = decay_rate * s;
  return -amplitude * decay_rate * std::tanh(z) / std::cosh(z);
}

double SolitonProfile::d2(double s) const {
  double z = decay_rate * s, sech = 1.0 / std::cosh(z);
  return amplitude * decay_rate * decay_rate * sech * (1.0 - 2.0 * sech * sech);
}

SolitonProfile build_soliton(const NlsCoefficients& c, double half_width, int n) {
  if (!c.focusing) throw RegimeError("coefficients are not in the focusing regime");
  if (n < 2) throw ConfigError("soliton needs at least two samples");
  SolitonProfile s;
  double cc = c.cubic();
  s.amplitude = c.alpha * std::sqrt(-3.0 * cc / c.a2);
  s.decay_rate = -3.0 * c.alpha * cc / c.a2;
  s.nu_nls = -9.0 * c.alpha * c.alpha * cc * cc / (8.0 * c.a2);
  s.i_nls = -3.0 * std::pow(c.alpha, 3) * cc * cc / (4.0 * c.a2);
  if (half_width <= 0) half_width = 25.0 / s.decay_rate;
  s.x.resize(n);
  s.phi.resize(n);
  for (int i = 0; i < n; ++i) {
    s.x[i] = -half_width + 2.0 * half_width * i / (n - 1);
    s.phi[i] = s.value(s.x[i]);
  }
  return s;
}

}  // namespace twolayer
