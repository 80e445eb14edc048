#pragma once

// Truncated Taylor series in one variable.  c[n] is the n-th Taylor
// coefficient, so the n-th derivative at the expansion point is n! * c[n].
// Only the operations needed to evaluate the dispersion relation are provided.

#include <array>
#include <cmath>

namespace twolayer {

template <int N>
struct Jet {
  std::array<double, N + 1> c{};

  Jet() = default;
  Jet(double v) { c[0] = v; }  // NOLINT: implicit promotion of constants is the point

  static Jet variable(double x0) {
    Jet j(x0);
    if constexpr (N >= 1) j.c[1] = 1.0;
    return j;
  }

  double value() const { return c[0]; }
  double derivative(int n) const {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f * c[n];
  }

  Jet& operator+=(const Jet& o) {
    for (int i = 0; i <= N; ++i) c[i] += o.c[i];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (int i = 0; i <= N; ++i) c[i] -= o.c[i];
    return *this;
  }
};

template <int N> Jet<N> operator+(Jet<N> a, const Jet<N>& b) { return a += b; }
template <int N> Jet<N> operator-(Jet<N> a, const Jet<N>& b) { return a -= b; }
template <int N> Jet<N> operator+(Jet<N> a, double b) { a.c[0] += b; return a; }
template <int N> Jet<N> operator+(double b, Jet<N> a) { a.c[0] += b; return a; }
template <int N> Jet<N> operator-(Jet<N> a, double b) { a.c[0] -= b; return a; }
template <int N> Jet<N> operator-(double b, const Jet<N>& a) { return Jet<N>(b) - a; }

template <int N>
Jet<N> operator-(Jet<N> a) {
  for (auto& v : a.c) v = -v;
  return a;
}

template <int N>
Jet<N> operator*(Jet<N> a, double s) {
  for (auto& v : a.c) v *= s;
  return a;
}
template <int N> Jet<N> operator*(double s, Jet<N> a) { return a * s; }

template <int N>
Jet<N> operator*(const Jet<N>& a, const Jet<N>& b) {
  Jet<N> r;
  for (int n = 0; n <= N; ++n) {
    double s = 0.0;
    for (int j = 0; j <= n; ++j) s += a.c[j] * b.c[n - j];
    r.c[n] = s;
  }
  return r;
}

template <int N>
Jet<N> operator/(const Jet<N>& a, const Jet<N>& b) {
  Jet<N> q;
  for (int n = 0; n <= N; ++n) {
    double s = a.c[n];
    for (int j = 1; j <= n; ++j) s -= b.c[j] * q.c[n - j];
    q.c[n] = s / b.c[0];
  }
  return q;
}
template <int N> Jet<N> operator/(const Jet<N>& a, double s) { return a * (1.0 / s); }
template <int N> Jet<N> operator/(double s, const Jet<N>& b) { return Jet<N>(s) / b; }

template <int N>
Jet<N> sqrt(const Jet<N>& a) {
  Jet<N> s;
  s.c[0] = std::sqrt(a.c[0]);
  for (int n = 1; n <= N; ++n) {
    double acc = a.c[n];
    for (int j = 1; j < n; ++j) acc -= s.c[j] * s.c[n - j];
    s.c[n] = acc / (2.0 * s.c[0]);
  }
  return s;
}

// t = tanh(x) from t' = (1 - t^2) x'.
template <int N>
Jet<N> tanh(const Jet<N>& x) {
  Jet<N> t, u;  // u = 1 - t^2
  t.c[0] = std::tanh(x.c[0]);
  u.c[0] = 1.0 - t.c[0] * t.c[0];
  for (int n = 1; n <= N; ++n) {
    double s = 0.0;
    for (int j = 1; j <= n; ++j) s += j * x.c[j] * u.c[n - j];
    t.c[n] = s / n;
    double tt = 0.0;
    for (int j = 0; j <= n; ++j) tt += t.c[j] * t.c[n - j];
    u.c[n] = -tt;
  }
  return t;
}

}  // namespace twolayer
