#include "twolayer/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "twolayer/errors.hpp"

namespace twolayer {

void Params::validate() const {
  if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("rho must lie in (0,1)");
  if (!(beta_under > 0.0)) throw ConfigError("beta_under must be positive");
  if (!(beta_over > 0.0)) throw ConfigError("beta_over must be positive");
}

double Matrix2::condition_symmetric() const {
  double m = 0.5 * (a11 + a22);
  double d = std::hypot(0.5 * (a11 - a22), 0.5 * (a12 + a21));
  double l1 = std::abs(m + d), l2 = std::abs(m - d);
  double lo = std::min(l1, l2), hi = std::max(l1, l2);
  return lo == 0.0 ? std::numeric_limits<double>::infinity() : hi / lo;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Valid: return "Valid";
    case Verdict::DoubleMinimum: return "DoubleMinimum";
    case Verdict::Degenerate: return "Degenerate";
  }
  return "?";
}

double k_coth(double k) {
  k = std::abs(k);
  if (k > 30) return k;
  if (k < 1e-4) return 1.0 + k * k / 3.0;
  return k / std::tanh(k);
}

double k_csch(double k) {
  k = std::abs(k);
  if (k > 30) return 0.0;
  if (k < 1e-4) return 1.0 - k * k / 6.0;
  return k / std::sinh(k);
}

Matrix2 eval_fbar(double k) {
  double c = k_coth(k), s = k_csch(k);
  return {c, -s, -s, c};
}

std::pair<Matrix2, Matrix2> eval_PF(double k, const Params& p) {
  if (k == 0.0) throw std::domain_error("eval_PF: F is singular at k = 0");
  double ak = std::abs(k);
  Matrix2 P{1.0 - p.rho + p.beta_under * k * k, 0.0, 0.0, p.rho * (1.0 + p.beta_over * k * k)};
  Matrix2 Fb = eval_fbar(k);
  Matrix2 F = Matrix2{ak, 0.0, 0.0, 0.0} + Fb * p.rho;
  for (double v : {P.a11, P.a22, F.a11, F.a12, F.a22})
    if (!std::isfinite(v)) throw std::range_error("eval_PF: non-finite entry");
  return {P, F};
}

Lambda eval_lambda(double k, const Params& p) {
  if (k == 0.0) throw std::domain_error("eval_lambda: undefined at k = 0");
  k = std::abs(k);
  const double r = p.rho;
  double t = std::tanh(k);
  double X = 1.0 - r + p.beta_under * k * k;
  double Y = 1.0 + p.beta_over * k * k;
  double B = X + Y * (t + r);
  double E = X - (t + r) * Y;
  double D = E * E + 4.0 * r * X * Y * detail::sech2(k);
  double sq = std::sqrt(D);
  Lambda out{2.0 * X * Y * t / (k * (B + sq)), (B + sq) / (2.0 * k * (1.0 + r * t)), D};
  if (!std::isfinite(out.minus) || !std::isfinite(out.plus)) throw std::range_error("eval_lambda: overflow");
  return out;
}

namespace {

double lam(double k, const Params& p) { return lambda_minus_generic(k, p); }

template <class F>
double golden_min(F&& f, double a, double b, double rel_tol) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 400 && (b - a) > rel_tol * 0.5 * (a + b); ++it) {
    if (fc < fd) {
      b = d; d = c; fd = fc;
      c = b - g * (b - a); fc = f(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + g * (b - a); fd = f(d);
    }
  }
  return fc < fd ? c : d;
}

// Second derivative by central differences with two Richardson levels over h, h/2, h/4.
template <class F>
double richardson_d2(F&& f, double x, double h, double scale) {
  auto d2 = [&](double s) { return (f(x + s) - 2.0 * f(x) + f(x - s)) / (s * s); };
  double D1 = d2(h), D2 = d2(h / 2), D3 = d2(h / 4);
  double R1a = (4 * D2 - D1) / 3, R1b = (4 * D3 - D2) / 3;
  double R = (16 * R1b - R1a) / 15;
  if (!std::isfinite(R) || std::abs(R1b - R1a) > 1e-4 * std::max(std::abs(R), scale))
    throw NumericalError("Richardson extrapolation did not settle");
  return R;
}

// Comparisons of nearly equal values limit golden section to about sqrt(eps) in k.
// A few Newton steps on lambda' (exact derivatives from jets) recover full precision
// at non-degenerate minima; the step is discarded if it leaves the bracket.
double polish_stationary(const Params& p, double k, double lo, double hi) {
  for (int it = 0; it < 8; ++it) {
    auto j = lambda_minus_generic(Jet<2>::variable(k), p);
    double d1 = j.derivative(1), d2 = j.derivative(2);
    if (!(d2 > 0)) return k;
    double kn = k - d1 / d2;
    if (!(kn > lo && kn < hi)) return k;
    if (std::abs(kn - k) <= 1e-15 * k) return kn;
    k = kn;
  }
  return k;
}

std::vector<double> scan_grid(const ScanWindow& w) {
  if (!(w.k_min > 0 && w.k_max > w.k_min && w.samples >= 8))
    throw ConfigError("scan window must satisfy 0 < k_min < k_max and samples >= 8");
  std::vector<double> ks(w.samples);
  double l0 = std::log(w.k_min), l1 = std::log(w.k_max);
  for (int i = 0; i < w.samples; ++i) ks[i] = std::exp(l0 + (l1 - l0) * i / (w.samples - 1));
  return ks;
}

}  // namespace

std::vector<LocalMin> local_minima(const Params& p, const ScanWindow& w) {
  auto ks = scan_grid(w);
  std::vector<double> ls(ks.size());
  for (size_t i = 0; i < ks.size(); ++i) ls[i] = lam(ks[i], p);
  std::vector<LocalMin> out;
  for (size_t i = 1; i + 1 < ks.size(); ++i) {
    if (!(ls[i] < ls[i - 1] && ls[i] <= ls[i + 1])) continue;
    double k = golden_min([&](double x) { return lam(x, p); }, ks[i - 1], ks[i + 1], 1e-12);
    k = polish_stationary(p, k, ks[i - 1], ks[i + 1]);
    LocalMin m{k, lam(k, p)};
    if (!out.empty() && std::abs(out.back().k - k) < 1e-6 * k) {
      if (m.lambda < out.back().lambda) out.back() = m;
      continue;
    }
    out.push_back(m);
  }
  // A minimum sitting on the window edge is not interior; report it as such.
  if (!out.empty()) {
    double best = std::min_element(out.begin(), out.end(),
                                   [](auto& a, auto& b) { return a.lambda < b.lambda; })->lambda;
    if (ls.front() < best || ls.back() < best)
      throw ConfigError("scan window exhausted: lambda_minus decreases towards a window edge; widen the window");
  }
  return out;
}

double second_derivative_lambda(const Params& p, double k0) {
  double scale = lam(k0, p) / (k0 * k0);
  return richardson_d2([&](double k) { return lam(k, p); }, k0, 1e-3 * k0, scale);
}

double eval_a(const Params& p, double k0) {
  if (!(k0 > 0)) throw std::domain_error("eval_a: k0 must be positive");
  const double r = p.rho;
  double t = std::tanh(k0);
  double X = 1.0 - r + p.beta_under * k0 * k0;
  double Y = 1.0 + p.beta_over * k0 * k0;
  double E = X - (t + r) * Y;
  double D = E * E + 4.0 * r * X * Y * detail::sech2(k0);
  double num = 0.5 * X - 0.5 * Y * (t + r) + 0.5 * std::sqrt(D);
  double e = std::exp(-k0);
  double sech = 2.0 * e / (1.0 + e * e);
  return num / (r * Y * sech);
}

Matrix2 eval_g(double k, const Params& p, double nu0) {
  auto [P, F] = eval_PF(k, p);
  return P - F * (nu0 * nu0);
}

Matrix2 eval_g0(const Params& p, double nu0) {
  double r = p.rho, n2 = nu0 * nu0;
  return {1.0 - r - r * n2, r * n2, r * n2, r - r * n2};
}

double eval_a2(const Params& p, double k0, double nu0, double a) {
  Vec2 v{1.0, -a};
  auto q = [&](double k) { return eval_g(k, p, nu0).quad(v); };
  double scale = eval_PF(k0, p).first.norm() * dot(v, v) / (k0 * k0);
  return richardson_d2(q, k0, 1e-3 * k0, scale);
}

AssumptionReport find_critical(const Params& p, const ScanWindow& w) {
  p.validate();
  auto mins = local_minima(p, w);
  if (mins.empty()) throw ConfigError("scan window exhausted: no interior minimum of lambda_minus");
  auto gi = std::min_element(mins.begin(), mins.end(), [](auto& a, auto& b) { return a.lambda < b.lambda; });
  AssumptionReport rep;
  CriticalPoint& c = rep.crit;
  c.k0 = gi->k;
  double l0 = gi->lambda;
  c.nu0 = std::sqrt(l0);
  c.a = eval_a(p, c.k0);
  c.lambda2 = second_derivative_lambda(p, c.k0);
  for (auto& m : mins)
    if (&m != &*gi && m.lambda - l0 <= 1e-9) rep.competing_minima.push_back(m);
  c.assumption1_global = rep.competing_minima.empty();
  c.assumption1_nondeg = c.lambda2 >= 1e-6 * l0 / (c.k0 * c.k0);
  if (c.assumption1_nondeg) {
    c.a2 = eval_a2(p, c.k0, c.nu0, c.a);
  } else {
    // A2 is not meaningful at a degenerate minimum; keep the number but do not let
    // a Richardson failure mask the verdict.
    try {
      c.a2 = eval_a2(p, c.k0, c.nu0, c.a);
    } catch (const NumericalError&) {
      c.a2 = std::numeric_limits<double>::quiet_NaN();
    }
  }
  if (!c.assumption1_nondeg)
    rep.verdict = Verdict::Degenerate;
  else if (!c.assumption1_global)
    rep.verdict = Verdict::DoubleMinimum;
  else
    rep.verdict = Verdict::Valid;
  return rep;
}

Params locate_degenerate(const Params& guess, double k_target) {
  guess.validate();
  auto residual = [&](const std::array<double, 3>& x) {
    Params q{x[0], x[1], x[2]};
    auto l = lambda_minus_generic(Jet<3>::variable(k_target), q);
    return std::array<double, 3>{l.derivative(1), l.derivative(2), l.derivative(3)};
  };
  std::array<double, 3> x{guess.rho, guess.beta_under, guess.beta_over};
  double last_rn = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 60; ++it) {
    auto r = residual(x);
    double rn = std::abs(r[0]) + std::abs(r[1]) + std::abs(r[2]);
    // Stop once the residual sits at its rounding floor.
    if (rn < 1e-15 || (rn < 1e-11 && rn >= 0.5 * last_rn)) break;
    last_rn = rn;
    double J[3][3];
    for (int j = 0; j < 3; ++j) {
      double h = 1e-7 * std::max(std::abs(x[j]), 1e-3);
      auto xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      auto rp = residual(xp), rm = residual(xm);
      for (int i = 0; i < 3; ++i) J[i][j] = (rp[i] - rm[i]) / (2 * h);
    }
    // Cramer's rule on the 3x3 system J dx = -r.
    auto det3 = [](double m[3][3]) {
      return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
             m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
             m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    };
    double d = det3(J);
    if (d == 0.0 || !std::isfinite(d)) throw NumericalError("locate_degenerate: singular Jacobian");
    std::array<double, 3> dx;
    for (int j = 0; j < 3; ++j) {
      double M[3][3];
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) M[a][b] = (b == j) ? -r[a] : J[a][b];
      dx[j] = det3(M) / d;
    }
    double prev = rn;
    // Damp until the residual does not grow, so a poor guess cannot leave the admissible set.
    double t = 1.0;
    for (int ls = 0; ls < 30; ++ls, t *= 0.5) {
      std::array<double, 3> xn{x[0] + t * dx[0], x[1] + t * dx[1], x[2] + t * dx[2]};
      if (!(xn[0] > 0 && xn[0] < 1 && xn[1] > 0 && xn[2] > 0)) continue;
      auto rr = residual(xn);
      if (std::abs(rr[0]) + std::abs(rr[1]) + std::abs(rr[2]) <= prev || ls == 29) {
        x = xn;
        break;
      }
    }
    if (it == 59) throw NumericalError("locate_degenerate: Newton iteration did not converge");
  }
  Params out{x[0], x[1], x[2]};
  out.validate();
  return out;
}

DoubleMinimumBracket bracket_double_minimum(const Params& base, double lo, double hi, double width,
                                            const ScanWindow& w) {
  if (!(hi > lo)) throw ConfigError("bracket_double_minimum: need lo < hi");
  auto global_k = [&](double bo) {
    Params q = base;
    q.beta_over = bo;
    auto mins = local_minima(q, w);
    if (mins.empty()) throw NumericalError("bracket_double_minimum: no interior minimum");
    return std::min_element(mins.begin(), mins.end(), [](auto& a, auto& b) { return a.lambda < b.lambda; })->k;
  };
  // Coarse pass: find adjacent samples between which the global minimiser jumps.
  const int coarse = 31;
  double prev_b = lo, prev_k = global_k(lo);
  double a = 0, b = 0, ka = 0;
  bool found = false;
  for (int i = 1; i < coarse; ++i) {
    double bo = lo + (hi - lo) * i / (coarse - 1);
    double k = global_k(bo);
    if (std::max(k, prev_k) > 2.0 * std::min(k, prev_k)) {
      a = prev_b; b = bo; ka = prev_k;
      found = true;
      break;
    }
    prev_b = bo; prev_k = k;
  }
  if (!found) throw NumericalError("bracket_double_minimum: no jump of the global minimiser in the interval");
  auto same_side = [&](double k) { return std::max(k, ka) <= 2.0 * std::min(k, ka); };
  DoubleMinimumBracket out{};
  bool recorded = false;
  for (int it = 0; it < 200 && b - a > 0; ++it) {
    if (!recorded && b - a <= width) {
      out.lo = a; out.hi = b;
      recorded = true;
    }
    double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;
    if (same_side(global_k(m))) a = m; else b = m;
  }
  if (!recorded) { out.lo = a; out.hi = b; }
  out.beta_star = 0.5 * (a + b);
  Params q = base;
  q.beta_over = out.beta_star;
  out.report = find_critical(q, w);
  return out;
}

}  // namespace twolayer
