#include "twolayer/validation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace twolayer {

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

SymbolCheck flat_symbol_check(const Params&, double k0, const std::vector<int>& harmonics, int nx,
                              const DnoOptions& o) {
  SymbolCheck out;
  PeriodicGrid g = PeriodicGrid::around_carrier(nx, k0, 1);
  const double depth = o.lower_depth > 0 ? o.lower_depth : 4 * g.period;
  for (int h : harmonics) {
    const double k = h * k0;
    Field f(g.n), zero(g.n, 0.0);
    for (int i = 0; i < g.n; ++i) f[i] = std::cos(k * g.x(i));
    auto rel_at = [&](const Field& t, double expect) {
      // Project onto the mode to compare one number per trace.
      double c = 0;
      for (int i = 0; i < g.n; ++i) c += t[i] * f[i];
      c *= 2.0 / g.n;
      return std::abs(c - expect) / std::abs(expect);
    };
    Matrix2 fb = eval_fbar(k);
    double worst = rel_at(ntd_lower(zero, f, g, o), 1.0 / (k * std::tanh(k * depth)));
    ProfilePair flat = ProfilePair::zero(g);
    Field tb, tt;
    ntd_upper(flat, f, zero, tb, tt, o);
    worst = std::max({worst, rel_at(tb, fb.a11 / (k * k)), rel_at(tt, -fb.a21 / (k * k))});
    ntd_upper(flat, zero, f, tb, tt, o);
    worst = std::max({worst, rel_at(tb, -fb.a12 / (k * k)), rel_at(tt, fb.a22 / (k * k))});
    out.k.push_back(k);
    out.rel_error.push_back(worst);
    out.worst = std::max(out.worst, worst);
  }
  return out;
}

ProfilePair smooth_test_pair(const CriticalPoint& crit, const PeriodicGrid& g) {
  ProfilePair u = ProfilePair::zero(g);
  const Vec2 v0 = crit.v0();
  const double k = crit.k0;
  for (int i = 0; i < g.n; ++i) {
    const double x = g.x(i);
    u.under[i] = v0[0] * std::cos(k * x) + 0.3 * std::cos(2 * k * x) + 0.1 * std::sin(3 * k * x);
    u.over[i] = v0[1] * std::cos(k * x) - 0.2 * std::cos(2 * k * x + 0.4) + 0.05 * std::cos(3 * k * x);
  }
  return u;
}

TruncationCheck truncation_order(const Params& p, const CriticalPoint& crit, const std::vector<double>& eps,
                                 int nx, ZeroMode zm, const DnoOptions& o) {
  TruncationCheck out;
  PeriodicGrid g = PeriodicGrid::around_carrier(nx, crit.k0, 1);
  ProfilePair u = smooth_test_pair(crit, g);
  std::vector<double> lx, ly;
  for (double e : eps) {
    ProfilePair eta = e * u;
    double r = std::abs(eval_L_exact(eta, p, o).total - eval_L(eta, p, zm).sum());
    out.eps.push_back(e);
    out.remainder.push_back(r);
    lx.push_back(std::log(e));
    ly.push_back(std::log(r));
  }
  out.slope = least_squares_slope(lx, ly);
  return out;
}

ProfilePair random_pair(const PeriodicGrid& g, double k_band, double h2, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(-1.0, 1.0), phase(0.0, 2 * std::numbers::pi);
  ProfilePair u = ProfilePair::zero(g);
  const double k1 = 2 * std::numbers::pi / g.period;
  const int modes = std::max(1, static_cast<int>(k_band / k1));
  for (int m = 1; m <= modes; ++m) {
    const double k = m * k1;
    const double w = 1.0 / (1 + k * k);
    const double au = w * amp(rng), pu = phase(rng), ao = w * amp(rng), po = phase(rng);
    for (int i = 0; i < g.n; ++i) {
      u.under[i] += au * std::cos(k * g.x(i) + pu);
      u.over[i] += ao * std::cos(k * g.x(i) + po);
    }
  }
  return (h2 / u.sobolev_norm(2)) * u;
}

GradientCheck gradient_check(const Params& p, const CriticalPoint& crit, const PeriodicGrid& g, double mu,
                             int samples, std::uint64_t seed) {
  GradientCheck out;
  out.samples = samples;
  const double band = 3 * crit.k0;
  auto rel = [](double fd, double an) { return std::abs(fd - an) / std::max(std::abs(an), 1e-300); };
  for (int s = 0; s < samples; ++s) {
    ProfilePair eta = random_pair(g, band, 0.2, seed + 2 * s);
    ProfilePair d = random_pair(g, band, 1.0, seed + 2 * s + 1);
    const double h = 1e-5;
    ProfilePair ep = eta + h * d, em = eta - h * d;
    double fdL = (eval_L(ep, p).sum() - eval_L(em, p).sum()) / (2 * h);
    double fdK = (eval_K(ep, p).total - eval_K(em, p).total) / (2 * h);
    double fdJ = (eval_J(ep, p, mu).j_mu - eval_J(em, p, mu).j_mu) / (2 * h);
    out.worst_L = std::max(out.worst_L, rel(fdL, grad_L_trunc(eta, p).dot(d)));
    out.worst_K = std::max(out.worst_K, rel(fdK, grad_K(eta, p).dot(d)));
    out.worst_J = std::max(out.worst_J, rel(fdJ, grad_J(eta, p, mu).dot(d)));
  }
  return out;
}

}  // namespace twolayer
