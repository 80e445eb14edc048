#include <gtest/gtest.h>

#include <cmath>

#include "twolayer/errors.hpp"
#include "twolayer/fieldops.hpp"

using namespace twolayer;

namespace {

const Params kFocusing{0.5, 1.0, 0.2};

struct FocusingCase {
  CriticalPoint crit = find_critical(kFocusing).crit;
  NlsCoefficients nls = compute_nls(kFocusing, crit);
};
const FocusingCase& focusing() {
  static FocusingCase f;
  return f;
}

// Single carrier along v0 on one wavelength.
ProfilePair carrier(const CriticalPoint& c, int n) {
  PeriodicGrid g = PeriodicGrid::around_carrier(n, c.k0, 1);
  ProfilePair e = ProfilePair::zero(g);
  for (int i = 0; i < n; ++i) {
    double cs = std::cos(c.k0 * g.x(i));
    e.under[i] = cs;
    e.over[i] = -c.a * cs;
  }
  return e;
}

double energy(const SolitonProfile& s, const NlsCoefficients& c, double shift) {
  double e = 0;
  for (size_t i = 0; i + 1 < s.x.size(); ++i) {
    auto f = [&](double x) {
      double p = s.value(x + shift), d = s.d1(x + shift);
      return 0.125 * c.a2 * d * d + 0.375 * c.cubic() * p * p * p * p;
    };
    e += 0.5 * (f(s.x[i]) + f(s.x[i + 1])) * (s.x[i + 1] - s.x[i]);
  }
  return e;
}

}  // namespace

TEST(Nls, A3MatchesModeProjection) {
  // The cubic gradient of a pure carrier forces the second harmonic and the mean
  // flow; projecting back through g^{-1} gives the quartic energy coefficient.
  const auto& [c, nls] = focusing();
  ProfilePair e1 = carrier(c, 32);
  ProfilePair l3p = grad_L_parts(e1, kFocusing).g3;
  const double nu2 = c.nu0 * c.nu0;
  ProfilePair resp = nu2 * apply_multiplier(
                               [&](double k) {
                                 if (k == 0) return eval_g0(kFocusing, c.nu0).inverse();
                                 if (std::abs(k - 2 * c.k0) < 1e-9) return eval_g(2 * c.k0, kFocusing, c.nu0).inverse();
                                 return Matrix2{};
                               },
                               l3p);
  double i4 = 0;
  for (double v : e1.under) i4 += v * v * v * v;
  i4 *= e1.grid.dx();
  double oracle = -nu2 * l3p.dot(resp) / i4;
  EXPECT_NEAR(nls.a3, oracle, 1e-11 * std::abs(oracle));
  EXPECT_NEAR(nls.a3, -104.87995868079, 1e-9);
}

TEST(Nls, A4MatchesQuarticExtraction) {
  const auto& [c, nls] = focusing();
  ProfilePair e1 = carrier(c, 32);
  const double quarter = 3 * e1.grid.period / 8;  // integral of cos^4 over the period
  KValues kv = eval_K(e1, kFocusing);
  LTerms lt = eval_L(e1, kFocusing);
  double oracle = (kv.k4 - c.nu0 * c.nu0 * lt.l4) / quarter;
  EXPECT_NEAR(nls.a4, oracle, 1e-11 * std::abs(oracle));
  A4Terms t = compute_a4(kFocusing, c);
  EXPECT_NEAR(t.a4_1, kv.k4 / quarter, 1e-14);
  EXPECT_NEAR(t.a4_2_under, eval_L_lower(e1.under, e1.grid).l4 / quarter, 1e-14);
  EXPECT_NEAR(t.a4_2_over, eval_L_upper(e1).l4 / quarter, 1e-12);
  EXPECT_NEAR(nls.a4, -1.4658950138345, 1e-11);
}

TEST(Nls, A4Composition) {
  const auto& [c, nls] = focusing();
  A4Terms t = compute_a4(kFocusing, c);
  EXPECT_EQ(t.a4, t.a4_1 - c.nu0 * c.nu0 * t.a4_2);
  EXPECT_EQ(t.a4_2, t.a4_2_under + kFocusing.rho * t.a4_2_over);
  EXPECT_DOUBLE_EQ(t.a4_1, -0.125 * (kFocusing.beta_under + kFocusing.rho * kFocusing.beta_over * std::pow(c.a, 4)) *
                               std::pow(c.k0, 4));
  EXPECT_DOUBLE_EQ(t.a4_2_under, -std::pow(c.k0, 3) / 6);
  EXPECT_LT(t.a4_1, 0.0);
}

TEST(Nls, A4OverReducesWithoutSurfaceComponent) {
  CriticalPoint c = focusing().crit;
  c.a = 0;
  Matrix2 f = eval_fbar(c.k0), f0 = eval_fbar(0.0), f2 = eval_fbar(2 * c.k0);
  double expect = -0.5 * f.a11 * c.k0 * c.k0 + f.a11 * f.a11 * (2 * f0.a11 + f2.a11) / 6;
  EXPECT_NEAR(compute_a4(kFocusing, c).a4_2_over, expect, 1e-14);
}

TEST(Nls, A3BlocksHandEvaluated) {
  // k0 = 1, nu0 = 1, a = 1, rho = 1/2: every F̄ entry is a coth or csch value.
  Params p{0.5, 1.0, 0.2};
  CriticalPoint c;
  c.k0 = 1;
  c.nu0 = 1;
  c.a = 1;
  const double cth1 = 1 / std::tanh(1.0), csh1 = 1 / std::sinh(1.0);
  const double cth2 = 2 / std::tanh(2.0), csh2 = 2 / std::sinh(2.0);
  const double u = cth1 + csh1, w = -csh1 - cth1, s = 0.5;
  EXPECT_NEAR(a3_blocks::c1(1, 1), u, 1e-15);
  EXPECT_NEAR(a3_blocks::c2(1, 1), w, 1e-15);
  Vec2 hd = a3_blocks::harmonic_diag(p, c), hc = a3_blocks::harmonic_cross(p, c);
  EXPECT_NEAR(hd[0], s * (1.5 - 0.5 * u * u - cth2 * u), 1e-14);
  EXPECT_NEAR(hd[1], s * (-1.5 + 0.5 * w * w - cth2 * w), 1e-14);
  EXPECT_NEAR(hc[0], s * (csh2 * w), 1e-14);
  EXPECT_NEAR(hc[1], s * (csh2 * u), 1e-14);
  Vec2 hl = a3_blocks::harmonic_lower(c);
  EXPECT_EQ(hl[0], 1.0);
  EXPECT_EQ(hl[1], 0.0);
  Vec2 md = a3_blocks::mean_diag(p, c), mc = a3_blocks::mean_cross(p, c);
  EXPECT_NEAR(md[0], s * (0.5 - 0.5 * u * u - u), 1e-14);
  EXPECT_NEAR(md[1], s * (-0.5 + 0.5 * w * w - w), 1e-14);
  EXPECT_NEAR(mc[0], s * w, 1e-14);
  EXPECT_NEAR(mc[1], s * u, 1e-14);
}

TEST(Nls, A3SignAndContinuity) {
  const auto& [c, nls] = focusing();
  EXPECT_LE(nls.a3, 0.0);
  Params q = kFocusing;
  q.beta_over += 1e-8;
  CriticalPoint cq = find_critical(q).crit;
  double d = compute_a3(q, cq).a3 - nls.a3;
  EXPECT_LT(std::abs(d), 1e-8 * 1e4);
  EXPECT_GT(std::abs(d), 0.0);
}

TEST(Nls, FocusingVerdict) {
  EXPECT_TRUE(check_focusing(-1, 0));
  EXPECT_FALSE(check_focusing(0, 1));
  const auto& nls = focusing().nls;
  EXPECT_TRUE(nls.focusing);
  EXPECT_LT(nls.nu_nls, 0.0);
  EXPECT_LT(nls.i_nls, 0.0);
  EXPECT_NEAR(nls.cubic(), -53.90587435, 1e-7);
}

TEST(Nls, AlphaIdentity) {
  const auto& [c, nls] = focusing();
  auto [P, F] = eval_PF(c.k0, kFocusing);
  EXPECT_NEAR(nls.alpha, 2 / (c.nu0 * F.quad(c.v0())), 1e-14);
  EXPECT_GT(nls.alpha, 0.0);
  EXPECT_NEAR(nls.alpha, 1.453413367168, 1e-11);
}

TEST(Nls, RegressionFixture) {
  const auto& nls = focusing().nls;
  EXPECT_NEAR(nls.nu_nls, -3427.414707738, 1e-7);
  EXPECT_NEAR(nls.i_nls, -3320.966900703, 1e-7);
  EXPECT_NEAR(nls.a4_1, -0.000395538955887, 1e-15);
}

TEST(Nls, SolitonSolvesProfileEquation) {
  const auto& nls = focusing().nls;
  SolitonProfile s = build_soliton(nls);
  EXPECT_EQ(s.x.size(), 4096u);
  EXPECT_NEAR(s.decay_rate * s.x.back(), 25.0, 1e-12);
  double worst = 0;
  for (size_t i = 1; i + 1 < s.x.size(); ++i) {
    double p = s.phi[i], d2 = s.d2(s.x[i]);
    double t1 = -0.25 * nls.a2 * d2, t2 = -2 * nls.nu_nls * p, t3 = 1.5 * nls.cubic() * p * p * p;
    double scale = std::max({std::abs(t1), std::abs(t2), std::abs(t3)});
    worst = std::max(worst, std::abs(t1 + t2 + t3) / scale);
  }
  EXPECT_LE(worst, 1e-10);
}

TEST(Nls, SolitonMassAndEnergy) {
  const auto& nls = focusing().nls;
  SolitonProfile s = build_soliton(nls);
  double mass = 0;
  for (size_t i = 0; i + 1 < s.x.size(); ++i)
    mass += 0.5 * (s.phi[i] * s.phi[i] + s.phi[i + 1] * s.phi[i + 1]) * (s.x[i + 1] - s.x[i]);
  EXPECT_NEAR(mass, 2 * nls.alpha, 1e-8 * 2 * nls.alpha);
  double e = energy(s, nls, 0.0);
  EXPECT_NEAR(e, s.i_nls, 1e-8 * std::abs(s.i_nls));
  EXPECT_EQ(s.i_nls, nls.i_nls);
  // Translating by whole sample steps only moves the negligible tails.
  double dx = s.x[1] - s.x[0];
  EXPECT_NEAR(energy(s, nls, 7 * dx), e, 1e-12 * std::abs(e));
}

TEST(Nls, SolitonNeedsFocusing) {
  NlsCoefficients c = focusing().nls;
  c.focusing = false;
  EXPECT_THROW(build_soliton(c), RegimeError);
}
