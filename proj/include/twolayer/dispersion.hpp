#pragma once

#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "twolayer/jet.hpp"

namespace twolayer {

// Dimensionless parameters: density ratio and the two surface-tension coefficients.
struct Params {
  double rho = 0.5;
  double beta_under = 1.0;
  double beta_over = 0.2;

  // Throws ConfigError when an invariant is violated.
  void validate() const;
};

using Vec2 = std::array<double, 2>;

struct Matrix2 {
  double a11 = 0, a12 = 0, a21 = 0, a22 = 0;

  Vec2 operator*(const Vec2& v) const { return {a11 * v[0] + a12 * v[1], a21 * v[0] + a22 * v[1]}; }
  Matrix2 operator*(double s) const { return {a11 * s, a12 * s, a21 * s, a22 * s}; }
  Matrix2 operator+(const Matrix2& o) const { return {a11 + o.a11, a12 + o.a12, a21 + o.a21, a22 + o.a22}; }
  Matrix2 operator-(const Matrix2& o) const { return {a11 - o.a11, a12 - o.a12, a21 - o.a21, a22 - o.a22}; }
  double det() const { return a11 * a22 - a12 * a21; }
  double norm() const { return std::sqrt(a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22); }
  Matrix2 inverse() const {
    double d = det();
    return {a22 / d, -a12 / d, -a21 / d, a11 / d};
  }
  // 2-norm condition number of a symmetric matrix.
  double condition_symmetric() const;
  double quad(const Vec2& v) const { Vec2 w = (*this) * v; return w[0] * v[0] + w[1] * v[1]; }
};

inline double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }
inline double norm(const Vec2& a) { return std::sqrt(dot(a, a)); }

// |k| coth|k| and |k|/sinh|k| with their limits at 0 and the large-|k| guard.
double k_coth(double k);
double k_csch(double k);

// The gap-layer multiplier matrix; at k = 0 its analytic limit [[1,-1],[-1,1]].
Matrix2 eval_fbar(double k);

std::pair<Matrix2, Matrix2> eval_PF(double k, const Params& p);

struct Lambda {
  double minus, plus, D;
};
Lambda eval_lambda(double k, const Params& p);

namespace detail {
inline double sech2(double k) {
  if (k > 30) return 4.0 * std::exp(-2.0 * k);
  double c = std::cosh(k);
  return 1.0 / (c * c);
}
template <int N>
Jet<N> sech2_from_tanh(const Jet<N>&, const Jet<N>& t) { return 1.0 - t * t; }
inline double sech2_from_tanh(double k, double) { return sech2(k); }
}  // namespace detail

// Slow branch in a form that also evaluates on Taylor jets (k > 0 only).
// Written through the product of the roots to avoid cancellation at small k.
template <class T>
T lambda_minus_generic(const T& k, const Params& p) {
  using std::sqrt;
  using std::tanh;
  const double r = p.rho;
  T t = tanh(k);
  T s2 = detail::sech2_from_tanh(k, t);
  T X = (1.0 - r) + p.beta_under * k * k;
  T Y = 1.0 + p.beta_over * k * k;
  T B = X + Y * (t + r);
  T E = X - (t + r) * Y;
  T D = E * E + 4.0 * r * X * Y * s2;
  return 2.0 * X * Y * t / (k * (B + sqrt(D)));
}

struct ScanWindow {
  double k_min = 1e-3;
  double k_max = 1e3;
  int samples = 4096;
};

struct CriticalPoint {
  double k0 = 0, nu0 = 0, a = 0, lambda2 = 0, a2 = 0;
  bool assumption1_global = false;
  bool assumption1_nondeg = false;

  Vec2 v0() const { return {1.0, -a}; }
};

enum class Verdict { Valid, DoubleMinimum, Degenerate };
std::string to_string(Verdict v);

struct LocalMin {
  double k, lambda;
};

struct AssumptionReport {
  CriticalPoint crit;
  std::vector<LocalMin> competing_minima;
  Verdict verdict = Verdict::Valid;
};

AssumptionReport find_critical(const Params& p, const ScanWindow& w = {});

// Every interior local minimum of lambda_minus on the scan window, refined, ascending in k.
std::vector<LocalMin> local_minima(const Params& p, const ScanWindow& w = {});

double second_derivative_lambda(const Params& p, double k0);
double eval_a(const Params& p, double k0);
Matrix2 eval_g(double k, const Params& p, double nu0);
// g at the origin, defined through the limit of F.
Matrix2 eval_g0(const Params& p, double nu0);
double eval_a2(const Params& p, double k0, double nu0, double a);

// Parameters at which the slow branch has a degenerate critical point at k_target
// (first three derivatives vanish), found by Newton iteration from a nearby guess.
Params locate_degenerate(const Params& guess, double k_target = 1.0);

// Bisection on the difference of the two lowest local minima as beta_over varies
// over [lo, hi] with rho and beta_under fixed.  The bracket shrinks until its width
// is below `width`; `beta_star` is then polished to machine precision.
struct DoubleMinimumBracket {
  double lo, hi, beta_star;
  AssumptionReport report;  // find_critical at beta_star
};
DoubleMinimumBracket bracket_double_minimum(const Params& base, double lo, double hi,
                                            double width = 1e-3, const ScanWindow& w = {});

}  // namespace twolayer
