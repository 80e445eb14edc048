#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "twolayer/errors.hpp"
#include "twolayer/validation.hpp"

using namespace twolayer;

namespace {

const Params kFocusing{0.5, 1.0, 0.2};
constexpr double kPi = std::numbers::pi;

struct FocusingCase {
  CriticalPoint crit = find_critical(kFocusing).crit;
  NlsCoefficients nls = compute_nls(kFocusing, crit);
};
const FocusingCase& focusing() {
  static FocusingCase f;
  return f;
}

// O(n^2) real multiplier on a 2*pi-periodic sample vector; the oracle for the
// FFT-based operators.
Field naive_multiplier(const Field& f, double period, const std::function<double(double)>& sym) {
  const int n = static_cast<int>(f.size());
  Field out(n, 0.0);
  for (int j = 0; j <= n / 2; ++j) {
    double re = 0, im = 0;
    for (int i = 0; i < n; ++i) {
      double th = 2 * kPi * j * i / n;
      re += f[i] * std::cos(th);
      im -= f[i] * std::sin(th);
    }
    double k = 2 * kPi * j / period, s = sym(k);
    double w = (j == 0 || 2 * j == n) ? 1.0 / n : 2.0 / n;
    for (int i = 0; i < n; ++i) {
      double th = 2 * kPi * j * i / n;
      out[i] += w * s * (re * std::cos(th) - im * std::sin(th));
    }
  }
  return out;
}

struct Modes {
  std::vector<int> m;
  std::vector<double> cu, su, co, so;
  double eval(double x, bool over, int deriv) const {
    double v = 0;
    for (size_t i = 0; i < m.size(); ++i) {
      double a = over ? co[i] : cu[i], b = over ? so[i] : su[i], k = m[i];
      double c = std::cos(k * x), s = std::sin(k * x);
      if (deriv == 0) v += a * c + b * s;
      if (deriv == 1) v += k * (-a * s + b * c);
      if (deriv == 2) v += -k * k * (a * c + b * s);
    }
    return v;
  }
  ProfilePair sample(const PeriodicGrid& g) const {
    ProfilePair e = ProfilePair::zero(g);
    for (int i = 0; i < g.n; ++i) {
      e.under[i] = eval(g.x(i), false, 0);
      e.over[i] = eval(g.x(i), true, 0);
    }
    return e;
  }
};

// Lower and upper truncations on a 4x fine grid without any dealiasing.
LTerms fine_lower(const Modes& md, int n) {
  const int N = 4 * n;
  Field e(N), ex(N), exx(N);
  for (int i = 0; i < N; ++i) {
    double x = (i - N / 2) * 2 * kPi / N;
    e[i] = md.eval(x, false, 0);
    ex[i] = md.eval(x, false, 1);
    exx[i] = md.eval(x, false, 2);
  }
  auto K = [&](const Field& f) { return naive_multiplier(f, 2 * kPi, [](double k) { return std::abs(k); }); };
  Field q = K(e), pq(N);
  for (int i = 0; i < N; ++i) pq[i] = e[i] * q[i];
  Field Kp = K(pq);
  LTerms t;
  const double h = 0.5 * 2 * kPi / N;
  for (int i = 0; i < N; ++i) {
    t.l2 += h * e[i] * q[i];
    t.l3 += h * (ex[i] * ex[i] - q[i] * q[i]) * e[i];
    t.l4 += h * (e[i] * e[i] * exx[i] * q[i] + pq[i] * Kp[i]);
  }
  return t;
}

LTerms fine_upper(const Modes& md, int n) {
  const int N = 4 * n;
  Field u(N), o(N), ux(N), ox(N), uxx(N), oxx(N);
  for (int i = 0; i < N; ++i) {
    double x = (i - N / 2) * 2 * kPi / N;
    u[i] = md.eval(x, false, 0);
    o[i] = md.eval(x, true, 0);
    ux[i] = md.eval(x, false, 1);
    ox[i] = md.eval(x, true, 1);
    uxx[i] = md.eval(x, false, 2);
    oxx[i] = md.eval(x, true, 2);
  }
  auto ent = [](int r, int c) {
    return [r, c](double k) {
      Matrix2 m = eval_fbar(k);
      return r == 0 ? (c == 0 ? m.a11 : m.a12) : (c == 0 ? m.a21 : m.a22);
    };
  };
  auto apply = [&](const Field& a, const Field& b, Field& ra, Field& rb) {
    Field a11 = naive_multiplier(a, 2 * kPi, ent(0, 0)), a12 = naive_multiplier(b, 2 * kPi, ent(0, 1));
    Field a21 = naive_multiplier(a, 2 * kPi, ent(1, 0)), a22 = naive_multiplier(b, 2 * kPi, ent(1, 1));
    ra.resize(N);
    rb.resize(N);
    for (int i = 0; i < N; ++i) {
      ra[i] = a11[i] + a12[i];
      rb[i] = a21[i] + a22[i];
    }
  };
  Field A, B;
  apply(u, o, A, B);
  Field p(N), mq(N);
  for (int i = 0; i < N; ++i) {
    p[i] = u[i] * A[i];
    mq[i] = -o[i] * B[i];
  }
  Field r, s;
  apply(p, mq, r, s);
  LTerms t;
  const double h = 0.5 * 2 * kPi / N;
  for (int i = 0; i < N; ++i) {
    t.l2 += h * (u[i] * A[i] + o[i] * B[i]);
    t.l3 += h * (-(ux[i] * ux[i] - A[i] * A[i]) * u[i] + (ox[i] * ox[i] - B[i] * B[i]) * o[i]);
    t.l4 += h * (A[i] * uxx[i] * u[i] * u[i] + B[i] * oxx[i] * o[i] * o[i] + p[i] * r[i] + mq[i] * s[i]);
  }
  return t;
}

ProfilePair reflect(const ProfilePair& e) {
  ProfilePair r = e;
  const int n = e.grid.n;
  for (int i = 0; i < n; ++i) {
    r.under[i] = e.under[(n - i) % n];
    r.over[i] = e.over[(n - i) % n];
  }
  return r;
}

PeriodicGrid carrier_grid(int n, int mult) { return PeriodicGrid::around_carrier(n, focusing().crit.k0, mult); }

}  // namespace

TEST(Fieldops, MultiplierOnSingleModes) {
  const double k0 = focusing().crit.k0;
  PeriodicGrid g = carrier_grid(64, 1);
  Field c(g.n), one(g.n, 1.0);
  for (int i = 0; i < g.n; ++i) c[i] = std::cos(k0 * g.x(i));
  Field kc = apply_multiplier(g, [](double k) { return std::abs(k); }, c);
  Field k1 = apply_multiplier(g, [](double k) { return std::abs(k); }, one);
  ProfilePair e{g, c, Field(g.n, 0.0)};
  ProfilePair fe = apply_multiplier([](double k) { return eval_fbar(k); }, e);
  Matrix2 f = eval_fbar(k0);
  for (int i = 0; i < g.n; ++i) {
    EXPECT_NEAR(kc[i], k0 * c[i], 4e-15);
    EXPECT_NEAR(k1[i], 0.0, 4e-15);
    EXPECT_NEAR(fe.under[i], f.a11 * c[i], 1e-14);
    EXPECT_NEAR(fe.over[i], f.a21 * c[i], 1e-14);
  }
}

TEST(Fieldops, KOnSimpleProfiles) {
  PeriodicGrid g = carrier_grid(64, 1);
  KValues z = eval_K(ProfilePair::zero(g), kFocusing);
  EXPECT_EQ(z.total, 0.0);
  EXPECT_EQ(z.k2, 0.0);
  EXPECT_EQ(z.k4, 0.0);
  const double k0 = focusing().crit.k0, A = 0.3;
  ProfilePair e = ProfilePair::zero(g);
  for (int i = 0; i < g.n; ++i) e.under[i] = A * std::cos(k0 * g.x(i));
  EXPECT_NEAR(eval_K(e, kFocusing).k2, A * A * g.period / 4 * (1 - kFocusing.rho + kFocusing.beta_under * k0 * k0), 1e-14);
}

TEST(Fieldops, KRemainderIsSixthOrder) {
  PeriodicGrid g(64, 2 * kPi);
  Modes md{{1, 2, 3}, {1, 0.5, 0.2}, {0, 0.3, 0}, {0.4, 0.1, 0.2}, {0.2, 0, 0.1}};
  ProfilePair u = md.sample(g);
  std::vector<double> la, lr;
  for (double A : {1e-1, 1e-2, 1e-3}) {
    KValues k = eval_K(A * u, kFocusing);
    la.push_back(std::log(A));
    lr.push_back(std::log(std::abs(k.total - k.k2 - k.k4)));
  }
  EXPECT_NEAR(least_squares_slope(la, lr), 6.0, 0.05);
}

TEST(Fieldops, LowerOnSingleMode) {
  PeriodicGrid g(32, 2 * kPi);
  const double A = 0.2;
  Field e(g.n);
  for (int i = 0; i < g.n; ++i) e[i] = A * std::cos(3 * g.x(i));
  LTerms t = eval_L_lower(e, g);
  EXPECT_NEAR(t.l2, A * A * g.period * 3 / 4, 1e-15);
  EXPECT_NEAR(t.l3, 0.0, 1e-15);
}

TEST(Fieldops, LowerMatchesFineGridQuadrature) {
  // Modes up to a quarter of the grid: the padded products are exact.
  const int n = 16;
  PeriodicGrid g(n, 2 * kPi);
  Modes md{{2, 4, 3}, {0.3, 0.2, 0}, {0, 0, 0.1}, {0, 0, 0}, {0, 0, 0}};
  LTerms code = eval_L_lower(md.sample(g).under, g), ref = fine_lower(md, n);
  EXPECT_NEAR(code.l2, ref.l2, 1e-13);
  EXPECT_NEAR(code.l3, ref.l3, 1e-13);
  EXPECT_NEAR(code.l4, ref.l4, 1e-13);
  EXPECT_GT(std::abs(ref.l4), 1e-3);
}

TEST(Fieldops, UpperMatchesFineGridQuadrature) {
  const int n = 16;
  PeriodicGrid g(n, 2 * kPi);
  Modes general{{1, 2, 4}, {0.3, 0.1, 0.05}, {0.1, 0, 0.02}, {-0.2, 0.05, 0.01}, {0, 0.1, 0.03}};
  Modes equal{{1, 3}, {0.3, 0.1}, {0.1, 0.0}, {0.3, 0.1}, {0.1, 0.0}};
  for (const Modes* md : {&general, &equal}) {
    LTerms code = eval_L_upper(md->sample(g)), ref = fine_upper(*md, n);
    EXPECT_NEAR(code.l2, ref.l2, 1e-13);
    EXPECT_NEAR(code.l3, ref.l3, 1e-13);
    EXPECT_NEAR(code.l4, ref.l4, 1e-13);
  }
  LTerms z = eval_L_upper(ProfilePair::zero(g));
  EXPECT_EQ(z.l4, 0.0);
}

TEST(Fieldops, UpperOnCarrier) {
  const auto& c = focusing().crit;
  PeriodicGrid g = carrier_grid(32, 1);
  const double A = 0.1;
  ProfilePair e = ProfilePair::zero(g);
  for (int i = 0; i < g.n; ++i) {
    e.under[i] = A * std::cos(c.k0 * g.x(i));
    e.over[i] = -c.a * e.under[i];
  }
  EXPECT_NEAR(eval_L_upper(e).l2, A * A * g.period / 4 * eval_fbar(c.k0).quad(c.v0()), 1e-14);
}

TEST(Fieldops, ParsevalForQuadraticPart) {
  PeriodicGrid g = carrier_grid(256, 4);
  ProfilePair e = random_pair(g, 3 * focusing().crit.k0, 0.3, 5);
  ProfilePair fe = apply_multiplier(
      [](double k) {
        Matrix2 m = eval_fbar(k) * kFocusing.rho;
        m.a11 += std::abs(k);
        return m;
      },
      e);
  double l2 = eval_L(e, kFocusing).l2, direct = 0.5 * e.dot(fe);
  EXPECT_NEAR(l2, direct, 1e-13 * std::abs(direct));
}

TEST(Fieldops, ZeroModeConventionOnlyTouchesTheMean) {
  PeriodicGrid g = carrier_grid(128, 2);
  ProfilePair e = random_pair(g, 3 * focusing().crit.k0, 0.3, 11);
  EXPECT_NEAR(eval_L(e, kFocusing, ZeroMode::limit).l2, eval_L(e, kFocusing, ZeroMode::periodic).l2, 1e-16);
  const double mu = 0.01, mo = -0.02;
  for (int i = 0; i < g.n; ++i) {
    e.under[i] += mu;
    e.over[i] += mo;
  }
  double d2 = eval_L(e, kFocusing, ZeroMode::limit).l2 - eval_L(e, kFocusing, ZeroMode::periodic).l2;
  EXPECT_NEAR(d2, kFocusing.rho * 0.5 * g.period * (mu - mo) * (mu - mo), 1e-14);
}

TEST(Fieldops, GradientsMatchFiniteDifferences) {
  const auto& c = focusing().crit;
  PeriodicGrid g = carrier_grid(1024, 8);
  GradientCheck gc = gradient_check(kFocusing, c, g, 2e-3, 10, 17);
  EXPECT_LE(gc.worst_L, 1e-6);
  EXPECT_LE(gc.worst_K, 1e-6);
  EXPECT_LE(gc.worst_J, 1e-6);
}

TEST(Fieldops, GradientPartsMatchFiniteDifferences) {
  PeriodicGrid g = carrier_grid(128, 2);
  const double band = 3 * focusing().crit.k0, h = 1e-5;
  for (ZeroMode zm : {ZeroMode::limit, ZeroMode::periodic}) {
    ProfilePair u = random_pair(g, band, 0.2, 101), d = random_pair(g, band, 1.0, 102);
    for (int i = 0; i < g.n; ++i) {
      u.under[i] += 0.01;
      d.over[i] += 0.3;
    }
    LTerms p = eval_L(u + h * d, kFocusing, zm), m = eval_L(u - h * d, kFocusing, zm);
    LGradients gr = grad_L_parts(u, kFocusing, zm);
    auto rel = [](double fd, double an) { return std::abs(fd - an) / std::abs(an); };
    EXPECT_LE(rel((p.l2 - m.l2) / (2 * h), gr.g2.dot(d)), 1e-8);
    EXPECT_LE(rel((p.l3 - m.l3) / (2 * h), gr.g3.dot(d)), 1e-8);
    EXPECT_LE(rel((p.l4 - m.l4) / (2 * h), gr.g4.dot(d)), 1e-7);
  }
  ProfilePair u = random_pair(g, band, 0.2, 103), d = random_pair(g, band, 1.0, 104);
  KValues kp = eval_K(u + h * d, kFocusing), km = eval_K(u - h * d, kFocusing);
  EXPECT_NEAR((kp.k2 - km.k2) / (2 * h), grad_K2(u, kFocusing).dot(d), 1e-9 * std::abs(grad_K2(u, kFocusing).dot(d)));
  EXPECT_NEAR((kp.k4 - km.k4) / (2 * h), grad_K4(u, kFocusing).dot(d), 1e-7 * std::abs(grad_K4(u, kFocusing).dot(d)));
  EXPECT_EQ(grad_L_trunc(ProfilePair::zero(g), kFocusing).norm(), 0.0);
}

TEST(Fieldops, TrilinearFormsAgreeWithCubicGradient) {
  PeriodicGrid g = carrier_grid(128, 2);
  const double band = 3 * focusing().crit.k0;
  ProfilePair u = random_pair(g, band, 0.3, 201), v = random_pair(g, band, 0.3, 202),
              d = random_pair(g, band, 0.3, 203);
  for (ZeroMode zm : {ZeroMode::limit, ZeroMode::periodic}) {
    ProfilePair m = m_combined(u, u, kFocusing, zm), g3 = grad_L_parts(u, kFocusing, zm).g3;
    EXPECT_LE((m - g3).norm(), 1e-13 * g3.norm());
    EXPECT_NEAR(m.dot(d), 3 * n_combined(u, u, d, kFocusing, zm), 1e-14 * std::abs(m.dot(d)) + 1e-18);
    EXPECT_NEAR(n_combined(u, u, u, kFocusing, zm), eval_L(u, kFocusing, zm).l3, 1e-14);
    ProfilePair muv = m_combined(u, v, kFocusing, zm), mvu = m_combined(v, u, kFocusing, zm);
    EXPECT_LE((muv - mvu).norm(), 1e-15 * muv.norm());
  }
  Field ml = m_lower(u.under, v.under, g), mu = m_lower(v.under, u.under, g);
  for (int i = 0; i < g.n; ++i) EXPECT_NEAR(ml[i], mu[i], 1e-18);
}

TEST(Fieldops, JBreakdownConsistent) {
  PeriodicGrid g = carrier_grid(256, 4);
  ProfilePair e = random_pair(g, 3 * focusing().crit.k0, 0.2, 7);
  FunctionalBreakdown b = eval_J(e, kFocusing, 2e-3);
  EXPECT_EQ(b.l_trunc, b.l2 + b.l3 + b.l4);
  EXPECT_DOUBLE_EQ(b.j_mu, b.k_total + b.mu * b.mu / b.l_trunc);
  JEvaluation je = evaluate_J(e, kFocusing, 2e-3);
  EXPECT_EQ(je.b.j_mu, b.j_mu);
  EXPECT_LE((je.grad - grad_J(e, kFocusing, 2e-3)).norm(), 1e-15 * je.grad.norm());
}

TEST(Fieldops, JOutsideConeThrows) {
  // For A cos(kx) the quartic term is -A^4 k^3 P / 16, which beats the quadratic one
  // once A k > 2.
  PeriodicGrid g(32, 2 * kPi);
  Modes md{{4}, {1.0}, {0}, {0}, {0}};
  ProfilePair e = md.sample(g);
  ASSERT_LE(eval_L(e, kFocusing).sum(), 0.0);
  EXPECT_THROW(eval_J(e, kFocusing, 1e-3), RegimeError);
  EXPECT_THROW(grad_J(e, kFocusing, 1e-3), RegimeError);
  EXPECT_NO_THROW(eval_J(0.1 * e, kFocusing, 1e-3));
}

TEST(Fieldops, TranslationAndReflectionInvariance) {
  PeriodicGrid g = carrier_grid(256, 4);
  ProfilePair e = random_pair(g, 3 * focusing().crit.k0, 0.3, 9);
  FunctionalBreakdown b = eval_J(e, kFocusing, 2e-3);
  for (int s : {1, 17, 128, 255}) {
    FunctionalBreakdown t = eval_J(e.shifted(s), kFocusing, 2e-3);
    EXPECT_NEAR(t.j_mu, b.j_mu, 1e-14 * b.j_mu);
    EXPECT_NEAR(t.l3, b.l3, 1e-14 * std::abs(b.l2));
    EXPECT_NEAR(t.l4, b.l4, 1e-14 * std::abs(b.l2));
  }
  FunctionalBreakdown r = eval_J(reflect(e), kFocusing, 2e-3);
  EXPECT_NEAR(r.k_total, b.k_total, 1e-14 * b.k_total);
  EXPECT_NEAR(r.l2, b.l2, 1e-14 * b.l2);
  EXPECT_NEAR(r.l3, b.l3, 1e-14 * b.l2);
  EXPECT_NEAR(r.l4, b.l4, 1e-14 * b.l2);
}

TEST(Fieldops, KCoercive) {
  PeriodicGrid g = carrier_grid(256, 4);
  double cmin = 1e300;
  for (int s = 0; s < 50; ++s) {
    ProfilePair e = random_pair(g, 6 * focusing().crit.k0, 0.05 + 0.005 * s, 300 + s);
    double h1 = e.sobolev_norm(1);
    cmin = std::min(cmin, eval_K(e, kFocusing).total / (h1 * h1));
  }
  EXPECT_GT(cmin, 0.0);
}

TEST(Fieldops, QuadraticLowerBound) {
  // K2 + mu^2/L2 >= 2 mu sqrt(K2/L2) >= 2 mu nu0 for every profile.
  const auto& c = focusing().crit;
  PeriodicGrid g = carrier_grid(256, 4);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> lmu(std::log(1e-4), std::log(1e-2)), amp(0.01, 0.4), band(0.5, 8.0);
  double worst = 1e300;
  for (int s = 0; s < 1000; ++s) {
    ProfilePair e = random_pair(g, band(rng) * c.k0, amp(rng), 5000 + s);
    double mu = std::exp(lmu(rng));
    FunctionalBreakdown b = eval_J(e, kFocusing, mu);
    worst = std::min(worst, (b.k2 + mu * mu / b.l2) / (2 * mu * c.nu0));
  }
  EXPECT_GE(worst, 1.0);
}

TEST(Fieldops, TestFunctionBasics) {
  const auto& [c, nls] = focusing();
  PeriodicGrid g = carrier_grid(4096, 32);
  ProfilePair z = build_eta_star(nls, c, kFocusing, 0.0, g);
  EXPECT_EQ(z.norm(), 0.0);
  EXPECT_THROW(build_eta_star(nls, c, kFocusing, 1e-5, g), RegimeError);
  const double mu = 2e-3;
  double eps = eps_of_mu(nls, c, kFocusing, g, mu);
  ProfilePair e = build_eta_star(nls, c, kFocusing, eps, g);
  FunctionalBreakdown b = eval_J(e, kFocusing, mu);
  EXPECT_NEAR(c.nu0 * b.l_trunc, mu, 1e-12 * mu);
  EXPECT_LT(b.j_mu, 2 * c.nu0 * mu);
  EXPECT_LE((reflect(e) - e).norm(), 1e-14 * e.norm());
}

TEST(Fieldops, TestFunctionSpectrumConcentrates) {
  const auto& [c, nls] = focusing();
  PeriodicGrid g = carrier_grid(4096, 32);
  const double eps = 2e-3;
  ProfilePair e = build_eta_star(nls, c, kFocusing, eps, g);
  SpectralOps ops(g);
  Spectrum s = ops.forward(e.under);
  const double width = 12 * eps * build_soliton(nls, 1.0, 2).decay_rate;
  double inside = 0, outside = 0;
  for (int j = 0; j <= g.n / 2; ++j) {
    double k = g.wavenumber(j), m = std::norm(s[j]);
    bool near = std::abs(k) <= width || std::abs(k - c.k0) <= width || std::abs(k - 2 * c.k0) <= width;
    (near ? inside : outside) += m;
  }
  EXPECT_LT(outside, 1e-12 * inside);
}

TEST(Fieldops, AmplitudeInverseRoundTrip) {
  const auto& [c, nls] = focusing();
  PeriodicGrid g = carrier_grid(8192, 64);
  for (double eps : {1e-3, 4e-4}) {
    double mu = mu_of_eps(nls, c, kFocusing, g, eps);
    EXPECT_NEAR(eps_of_mu(nls, c, kFocusing, g, mu), eps, 1e-10 * eps);
  }
}

TEST(Fieldops, AmplitudeMatchesSpeedConstraintAtSmallAmplitude) {
  // mu(eps)/eps -> (nu0 F(k0)v0.v0 / 4) * 2 alpha = 1.
  const auto& [c, nls] = focusing();
  PeriodicGrid g = carrier_grid(16384, 1024);
  double prev = 1e300;
  for (double eps : {1e-4, 5e-5, 2.5e-5}) {
    double dev = std::abs(mu_of_eps(nls, c, kFocusing, g, eps) / eps - 1);
    EXPECT_LT(dev, prev);
    prev = dev;
  }
  EXPECT_LT(prev, 2e-2);
}

TEST(Fieldops, CubicEnergyLawAtSmallAmplitude) {
  const auto& [c, nls] = focusing();
  PeriodicGrid g = carrier_grid(16384, 1024);
  double prev = 1e300;
  for (double eps : {1e-4, 5e-5, 2.5e-5}) {
    ProfilePair e = build_eta_star(nls, c, kFocusing, eps, g);
    double val = (eval_K(e, kFocusing).total - c.nu0 * c.nu0 * eval_L(e, kFocusing).sum()) / std::pow(eps, 3);
    double dev = std::abs(val / nls.i_nls - 1);
    EXPECT_LT(dev, prev);
    prev = dev;
  }
  EXPECT_LT(prev, 5e-2);
}
