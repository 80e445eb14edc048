#include "twolayer/fieldops.hpp"

#include <algorithm>
#include <cmath>

#include "twolayer/errors.hpp"

namespace twolayer {

// ---------------------------------------------------------------- ProfilePair

ProfilePair& ProfilePair::operator+=(const ProfilePair& o) {
  for (int i = 0; i < grid.n; ++i) {
    under[i] += o.under[i];
    over[i] += o.over[i];
  }
  return *this;
}

ProfilePair& ProfilePair::operator-=(const ProfilePair& o) {
  for (int i = 0; i < grid.n; ++i) {
    under[i] -= o.under[i];
    over[i] -= o.over[i];
  }
  return *this;
}

ProfilePair& ProfilePair::operator*=(double s) {
  for (int i = 0; i < grid.n; ++i) {
    under[i] *= s;
    over[i] *= s;
  }
  return *this;
}

double ProfilePair::dot(const ProfilePair& o) const {
  double s = 0.0;
  for (int i = 0; i < grid.n; ++i) s += under[i] * o.under[i] + over[i] * o.over[i];
  return s * grid.dx();
}

double ProfilePair::sobolev_norm(int s) const {
  SpectralOps ops(grid);
  return std::sqrt(ops.sobolev_sq(under, s) + ops.sobolev_sq(over, s));
}

ProfilePair ProfilePair::shifted(int shift) const {
  ProfilePair r = ProfilePair::zero(grid);
  const int n = grid.n;
  int s = ((shift % n) + n) % n;
  for (int i = 0; i < n; ++i) {
    r.under[(i + s) % n] = under[i];
    r.over[(i + s) % n] = over[i];
  }
  return r;
}

ProfilePair operator+(ProfilePair a, const ProfilePair& b) { return a += b; }
ProfilePair operator-(ProfilePair a, const ProfilePair& b) { return a -= b; }
ProfilePair operator*(double s, ProfilePair a) { return a *= s; }

Field apply_multiplier(const PeriodicGrid& g, const std::function<double(double)>& symbol, const Field& f) {
  return SpectralOps(g).apply(f, symbol);
}

ProfilePair apply_multiplier(const std::function<Matrix2(double)>& symbol, const ProfilePair& f) {
  ProfilePair r = ProfilePair::zero(f.grid);
  SpectralOps(f.grid).apply2(f.under, f.over, symbol, r.under, r.over);
  return r;
}

namespace {

// Coarse grid plus the twice finer grid on which every pointwise product is formed.
// For band-limited inputs the cubic and quartic integrals are then exact, and a
// gradient formed on the fine grid and projected back to the coarse band is the
// exact gradient of the discrete functional.
struct Ctx {
  SpectralOps c, f;
  ZeroMode zm;
  explicit Ctx(const PeriodicGrid& g, ZeroMode z = ZeroMode::limit) : c(g), f(g.refined(2)), zm(z) {}
  Matrix2 fbar(double k) const { return (k == 0.0 && zm == ZeroMode::periodic) ? Matrix2{0, 0, 0, 0} : eval_fbar(k); }

  Field up(const Spectrum& s) const { return f.inverse(c.refine_spec(s, 2)); }
  Field up(const Spectrum& s, const std::function<cplx(double)>& m) const {
    Spectrum t(s.size());
    for (int j = 0; j < c.n() / 2; ++j) t[j] = s[j] * m(c.grid().wavenumber(j));
    t[c.n() / 2] = 0.0;
    return up(t);
  }
  Field down(const Field& fine) const { return c.coarsen(fine, 2); }
  double integral(const Field& fine) const { return f.integral(fine); }
  Field K(const Field& fine) const { return f.apply(fine, symbol_abs); }
  Field dxx(const Field& fine) const { return f.dx(fine, 2); }
  Field dx(const Field& fine) const { return f.dx(fine, 1); }
  void Fbar(const Field& a, const Field& b, Field& oa, Field& ob) const {
    f.apply2(a, b, [this](double k) { return fbar(k); }, oa, ob);
  }
};

cplx ik(double k) { return {0.0, k}; }
cplx mk2(double k) { return {-k * k, 0.0}; }
cplx kabs(double k) { return {std::abs(k), 0.0}; }

Field mul(const Field& a, const Field& b) {
  Field r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] * b[i];
  return r;
}

struct LowerFine {
  Field e, ex, exx, q;  // q = K e
};

LowerFine lower_fields(const Ctx& x, const Field& eta) {
  Spectrum s = x.c.forward(eta);
  return {x.up(s), x.up(s, ik), x.up(s, mk2), x.up(s, kabs)};
}

struct UpperFine {
  Field eu, eo, eux, eox, euxx, eoxx, A, B;
};

UpperFine upper_fields(const Ctx& x, const ProfilePair& eta) {
  Spectrum su = x.c.forward(eta.under), so = x.c.forward(eta.over);
  Spectrum sa(su.size()), sb(su.size());
  for (int j = 0; j < x.c.n() / 2; ++j) {
    Matrix2 m = x.fbar(x.c.grid().wavenumber(j));
    sa[j] = m.a11 * su[j] + m.a12 * so[j];
    sb[j] = m.a21 * su[j] + m.a22 * so[j];
  }
  return {x.up(su), x.up(so), x.up(su, ik), x.up(so, ik), x.up(su, mk2), x.up(so, mk2), x.up(sa), x.up(sb)};
}

}  // namespace

// ---------------------------------------------------------------- K

KValues eval_K(const ProfilePair& eta, const Params& p) {
  Ctx x(eta.grid);
  Spectrum su = x.c.forward(eta.under), so = x.c.forward(eta.over);
  Field eu = x.up(su), eo = x.up(so), ux = x.up(su, ik), ox = x.up(so, ik);
  const double r = p.rho, bu = p.beta_under, bo = p.beta_over;
  double tot = 0, k2 = 0, k4 = 0;
  for (size_t i = 0; i < eu.size(); ++i) {
    double tu = ux[i] * ux[i], to = ox[i] * ox[i];
    double base = 0.5 * (1 - r) * eu[i] * eu[i] + 0.5 * r * eo[i] * eo[i];
    // sqrt(1+t)-1 written without cancellation
    tot += base + bu * tu / (std::sqrt(1 + tu) + 1) + r * bo * to / (std::sqrt(1 + to) + 1);
    k2 += base + 0.5 * (r * bo * to + bu * tu);
    k4 += -0.125 * (r * bo * to * to + bu * tu * tu);
  }
  double dxf = x.f.grid().dx();
  return {tot * dxf, k2 * dxf, k4 * dxf};
}

ProfilePair grad_K(const ProfilePair& eta, const Params& p) {
  Ctx x(eta.grid);
  Spectrum su = x.c.forward(eta.under), so = x.c.forward(eta.over);
  Field ux = x.up(su, ik), ox = x.up(so, ik);
  for (size_t i = 0; i < ux.size(); ++i) {
    ux[i] /= std::sqrt(1 + ux[i] * ux[i]);
    ox[i] /= std::sqrt(1 + ox[i] * ox[i]);
  }
  Field du = x.down(x.dx(ux)), dov = x.down(x.dx(ox));
  ProfilePair g = ProfilePair::zero(eta.grid);
  Field eu = x.c.inverse(su), eo = x.c.inverse(so);
  for (int i = 0; i < eta.grid.n; ++i) {
    g.under[i] = (1 - p.rho) * eu[i] - p.beta_under * du[i];
    g.over[i] = p.rho * eo[i] - p.rho * p.beta_over * dov[i];
  }
  return g;
}

ProfilePair grad_K2(const ProfilePair& eta, const Params& p) {
  SpectralOps c(eta.grid);
  Spectrum su = c.forward(eta.under), so = c.forward(eta.over);
  const double r = p.rho;
  auto gu = c.apply_spec(su, [&](double k) { return 1 - r + p.beta_under * k * k; });
  auto go = c.apply_spec(so, [&](double k) { return r * (1 + p.beta_over * k * k); });
  return {eta.grid, c.inverse(gu), c.inverse(go)};
}

ProfilePair grad_K4(const ProfilePair& eta, const Params& p) {
  Ctx x(eta.grid);
  Field ux = x.up(x.c.forward(eta.under), ik), ox = x.up(x.c.forward(eta.over), ik);
  for (size_t i = 0; i < ux.size(); ++i) {
    ux[i] = ux[i] * ux[i] * ux[i];
    ox[i] = ox[i] * ox[i] * ox[i];
  }
  Field du = x.down(x.dx(ux)), dov = x.down(x.dx(ox));
  ProfilePair g = ProfilePair::zero(eta.grid);
  for (int i = 0; i < eta.grid.n; ++i) {
    g.under[i] = 0.5 * p.beta_under * du[i];
    g.over[i] = 0.5 * p.rho * p.beta_over * dov[i];
  }
  return g;
}

// ---------------------------------------------------------------- L, lower layer

LTerms eval_L_lower(const Field& eta, const PeriodicGrid& g) {
  Ctx x(g);
  LowerFine w = lower_fields(x, eta);
  Field pq = mul(w.e, w.q);
  Field Kp = x.K(pq);
  double l2 = 0, l3 = 0, l4 = 0;
  for (size_t i = 0; i < w.e.size(); ++i) {
    l2 += w.e[i] * w.q[i];
    l3 += (w.ex[i] * w.ex[i] - w.q[i] * w.q[i]) * w.e[i];
    l4 += w.e[i] * w.e[i] * w.exx[i] * w.q[i] + pq[i] * Kp[i];
  }
  double h = 0.5 * x.f.grid().dx();
  return {h * l2, h * l3, h * l4};
}

LGradients grad_L_lower_parts(const Field& eta, const PeriodicGrid& g) {
  Ctx x(g);
  LowerFine w = lower_fields(x, eta);
  const size_t N = w.e.size();
  Field pq = mul(w.e, w.q), Kp = x.K(pq);
  Field g3(N), e2q(N), e2exx(N), eKp(N), g4(N);
  for (size_t i = 0; i < N; ++i) {
    e2q[i] = w.e[i] * w.e[i] * w.q[i];
    e2exx[i] = w.e[i] * w.e[i] * w.exx[i];
    eKp[i] = w.e[i] * Kp[i];
  }
  Field Kpq = Kp;  // K(e q)
  Field d_e2q = x.dxx(e2q), K_e2exx = x.K(e2exx), K_eKp = x.K(eKp);
  for (size_t i = 0; i < N; ++i) {
    g3[i] = -0.5 * w.ex[i] * w.ex[i] - w.e[i] * w.exx[i] - 0.5 * w.q[i] * w.q[i] - Kpq[i];
    g4[i] = w.e[i] * w.exx[i] * w.q[i] + 0.5 * d_e2q[i] + 0.5 * K_e2exx[i] + w.q[i] * Kp[i] + K_eKp[i];
  }
  Field zero(g.n, 0.0);
  return {{g, x.c.apply(eta, symbol_abs), zero}, {g, x.down(g3), zero}, {g, x.down(g4), zero}};
}

// ---------------------------------------------------------------- L, upper layer

LTerms eval_L_upper(const ProfilePair& eta, ZeroMode zm) {
  Ctx x(eta.grid, zm);
  UpperFine w = upper_fields(x, eta);
  const size_t N = w.eu.size();
  Field p = mul(w.eu, w.A), q = mul(w.eo, w.B), mq(N);
  for (size_t i = 0; i < N; ++i) mq[i] = -q[i];
  Field r, s;
  x.Fbar(p, mq, r, s);  // r = K11 p - K12 q, s = K21 p - K22 q
  double l2 = 0, l3 = 0, l4 = 0;
  for (size_t i = 0; i < N; ++i) {
    l2 += w.eu[i] * w.A[i] + w.eo[i] * w.B[i];
    l3 += -(w.eux[i] * w.eux[i] - w.A[i] * w.A[i]) * w.eu[i] + (w.eox[i] * w.eox[i] - w.B[i] * w.B[i]) * w.eo[i];
    l4 += w.A[i] * w.euxx[i] * w.eu[i] * w.eu[i] + w.B[i] * w.eoxx[i] * w.eo[i] * w.eo[i] + p[i] * r[i] - q[i] * s[i];
  }
  double h = 0.5 * x.f.grid().dx();
  return {h * l2, h * l3, h * l4};
}

LGradients grad_L_upper_parts(const ProfilePair& eta, ZeroMode zm) {
  Ctx x(eta.grid, zm);
  UpperFine w = upper_fields(x, eta);
  const size_t N = w.eu.size();
  Field p = mul(w.eu, w.A), q = mul(w.eo, w.B), mq(N);
  for (size_t i = 0; i < N; ++i) mq[i] = -q[i];
  Field r, s;
  x.Fbar(p, mq, r, s);
  for (auto& v : s) v = -v;  // s = K22 q - K21 p
  Field g3u(N), g3o(N), uu(N), vv(N), Aeu2(N), Beo2(N);
  for (size_t i = 0; i < N; ++i) {
    g3u[i] = 0.5 * w.eux[i] * w.eux[i] + w.eu[i] * w.euxx[i] + 0.5 * w.A[i] * w.A[i] + r[i];
    g3o[i] = -0.5 * w.eox[i] * w.eox[i] - w.eo[i] * w.eoxx[i] - 0.5 * w.B[i] * w.B[i] - s[i];
    uu[i] = 0.5 * w.euxx[i] * w.eu[i] * w.eu[i] + w.eu[i] * r[i];
    vv[i] = 0.5 * w.eoxx[i] * w.eo[i] * w.eo[i] + w.eo[i] * s[i];
    Aeu2[i] = w.A[i] * w.eu[i] * w.eu[i];
    Beo2[i] = w.B[i] * w.eo[i] * w.eo[i];
  }
  Field Fu, Fv;
  x.Fbar(uu, vv, Fu, Fv);
  Field dA = x.dxx(Aeu2), dB = x.dxx(Beo2);
  Field g4u(N), g4o(N);
  for (size_t i = 0; i < N; ++i) {
    g4u[i] = Fu[i] + 0.5 * dA[i] + w.A[i] * w.euxx[i] * w.eu[i] + w.A[i] * r[i];
    g4o[i] = Fv[i] + 0.5 * dB[i] + w.B[i] * w.eoxx[i] * w.eo[i] + w.B[i] * s[i];
  }
  LGradients out;
  out.g2 = apply_multiplier([&x](double k) { return x.fbar(k); }, eta);
  out.g3 = {eta.grid, x.down(g3u), x.down(g3o)};
  out.g4 = {eta.grid, x.down(g4u), x.down(g4o)};
  return out;
}

LTerms eval_L(const ProfilePair& eta, const Params& p, ZeroMode zm) {
  LTerms lo = eval_L_lower(eta.under, eta.grid), up = eval_L_upper(eta, zm);
  return {lo.l2 + p.rho * up.l2, lo.l3 + p.rho * up.l3, lo.l4 + p.rho * up.l4};
}

LGradients grad_L_parts(const ProfilePair& eta, const Params& p, ZeroMode zm) {
  LGradients lo = grad_L_lower_parts(eta.under, eta.grid), up = grad_L_upper_parts(eta, zm);
  auto comb = [&](const ProfilePair& a, const ProfilePair& b) { return a + p.rho * b; };
  return {comb(lo.g2, up.g2), comb(lo.g3, up.g3), comb(lo.g4, up.g4)};
}

ProfilePair grad_L_trunc(const ProfilePair& eta, const Params& p, ZeroMode zm) {
  return grad_L_parts(eta, p, zm).total();
}

// ---------------------------------------------------------------- m and n

Field m_lower(const Field& u1, const Field& u2, const PeriodicGrid& g) {
  Ctx x(g);
  LowerFine a = lower_fields(x, u1), b = lower_fields(x, u2);
  Field t1 = mul(a.e, b.q), t2 = mul(b.e, a.q);
  Field K1 = x.K(t1), K2 = x.K(t2);
  Field r(a.e.size());
  for (size_t i = 0; i < r.size(); ++i)
    r[i] = -0.5 * K1[i] - 0.5 * K2[i] - 0.5 * a.q[i] * b.q[i] - 0.5 * a.ex[i] * b.ex[i] - 0.5 * a.exx[i] * b.e[i] -
           0.5 * a.e[i] * b.exx[i];
  return x.down(r);
}

ProfilePair m_upper(const ProfilePair& u1, const ProfilePair& u2, ZeroMode zm) {
  Ctx x(u1.grid, zm);
  UpperFine a = upper_fields(x, u1), b = upper_fields(x, u2);
  const size_t N = a.eu.size();
  // Products that receive a multiplier: P = under * A-type, Q = over * B-type, both symmetrised.
  Field P(N), Q(N);
  for (size_t i = 0; i < N; ++i) {
    P[i] = a.eu[i] * b.A[i] + b.eu[i] * a.A[i];
    Q[i] = a.eo[i] * b.B[i] + b.eo[i] * a.B[i];
  }
  Field KP1, KP2, KQ1, KQ2;  // KP1 = K11 P, KP2 = K21 P, KQ1 = K12 Q, KQ2 = K22 Q
  Field zero(N, 0.0);
  x.Fbar(P, zero, KP1, KP2);
  x.Fbar(zero, Q, KQ1, KQ2);
  Field ru(N), ro(N);
  for (size_t i = 0; i < N; ++i) {
    ru[i] = 0.5 * a.eux[i] * b.eux[i] + 0.5 * a.euxx[i] * b.eu[i] + 0.5 * b.euxx[i] * a.eu[i] + 0.5 * a.A[i] * b.A[i] +
            0.5 * KP1[i] - 0.5 * KQ1[i];
    ro[i] = -0.5 * a.eox[i] * b.eox[i] - 0.5 * a.eoxx[i] * b.eo[i] - 0.5 * b.eoxx[i] * a.eo[i] - 0.5 * a.B[i] * b.B[i] -
            0.5 * KQ2[i] + 0.5 * KP2[i];
  }
  return {u1.grid, x.down(ru), x.down(ro)};
}

ProfilePair m_combined(const ProfilePair& u1, const ProfilePair& u2, const Params& p, ZeroMode zm) {
  ProfilePair r = p.rho * m_upper(u1, u2, zm);
  Field lo = m_lower(u1.under, u2.under, u1.grid);
  for (int i = 0; i < u1.grid.n; ++i) r.under[i] += lo[i];
  return r;
}

double n_lower(const Field& u1, const Field& u2, const Field& u3, const PeriodicGrid& g) {
  Ctx x(g);
  LowerFine a = lower_fields(x, u1), b = lower_fields(x, u2), c = lower_fields(x, u3);
  double s = 0;
  for (size_t i = 0; i < a.e.size(); ++i) {
    s += a.ex[i] * b.ex[i] * c.e[i] + a.ex[i] * c.ex[i] * b.e[i] + b.ex[i] * c.ex[i] * a.e[i];
    s -= a.q[i] * b.q[i] * c.e[i] + a.q[i] * c.q[i] * b.e[i] + b.q[i] * c.q[i] * a.e[i];
  }
  return s * x.f.grid().dx() / 6.0;
}

double n_upper(const ProfilePair& u1, const ProfilePair& u2, const ProfilePair& u3, ZeroMode zm) {
  Ctx x(u1.grid, zm);
  UpperFine a = upper_fields(x, u1), b = upper_fields(x, u2), c = upper_fields(x, u3);
  // The third factor in the surface term carries the index 3, as in the interface term.
  auto sym = [](double x1, double x2, double x3, double y1, double y2, double y3) {
    return x1 * x2 * y3 + x1 * x3 * y2 + x2 * x3 * y1;
  };
  double s = 0;
  for (size_t i = 0; i < a.eu.size(); ++i) {
    s += sym(a.eox[i], b.eox[i], c.eox[i], a.eo[i], b.eo[i], c.eo[i]);
    s -= sym(a.eux[i], b.eux[i], c.eux[i], a.eu[i], b.eu[i], c.eu[i]);
    s += sym(a.A[i], b.A[i], c.A[i], a.eu[i], b.eu[i], c.eu[i]);
    s -= sym(a.B[i], b.B[i], c.B[i], a.eo[i], b.eo[i], c.eo[i]);
  }
  return s * x.f.grid().dx() / 6.0;
}

double n_combined(const ProfilePair& u1, const ProfilePair& u2, const ProfilePair& u3, const Params& p, ZeroMode zm) {
  return n_lower(u1.under, u2.under, u3.under, u1.grid) + p.rho * n_upper(u1, u2, u3, zm);
}

// ---------------------------------------------------------------- J

namespace {
FunctionalBreakdown breakdown(const KValues& kv, const LTerms& lt, double mu) {
  FunctionalBreakdown b;
  b.k_total = kv.total;
  b.k2 = kv.k2;
  b.k4 = kv.k4;
  b.l2 = lt.l2;
  b.l3 = lt.l3;
  b.l4 = lt.l4;
  b.l_trunc = lt.sum();
  b.mu = mu;
  if (!(b.l_trunc > 0)) throw RegimeError("L truncation is not positive: profile lies outside the cone of validity");
  b.j_mu = b.k_total + mu * mu / b.l_trunc;
  return b;
}
}  // namespace

FunctionalBreakdown eval_J(const ProfilePair& eta, const Params& p, double mu, ZeroMode zm) {
  return breakdown(eval_K(eta, p), eval_L(eta, p, zm), mu);
}

JEvaluation evaluate_J(const ProfilePair& eta, const Params& p, double mu, ZeroMode zm) {
  JEvaluation r;
  r.b = eval_J(eta, p, mu, zm);
  double w = (mu / r.b.l_trunc) * (mu / r.b.l_trunc);
  r.grad = grad_K(eta, p) - w * grad_L_trunc(eta, p, zm);
  return r;
}

ProfilePair grad_J(const ProfilePair& eta, const Params& p, double mu, ZeroMode zm) {
  return evaluate_J(eta, p, mu, zm).grad;
}

// ---------------------------------------------------------------- test function

ProfilePair build_eta_star(const NlsCoefficients& c, const CriticalPoint& crit, const Params& p, double eps,
                           const PeriodicGrid& grid) {
  ProfilePair eta = ProfilePair::zero(grid);
  if (eps == 0.0) return eta;
  if (!c.focusing) throw RegimeError("test function needs focusing coefficients");
  if (!(eps > 0)) throw ConfigError("eps must be non-negative");
  NlsCoefficients cc = c;
  SolitonProfile sol = build_soliton(cc, 1.0, 2);
  const double L = grid.period, b = sol.decay_rate * eps;
  if (1.0 / std::cosh(0.5 * b * L) > 1e-12)
    throw RegimeError("envelope overlaps its periodic images: enlarge the period");
  int images = 1;
  while (1.0 / std::cosh(b * (images + 0.5) * L) > 1e-20) ++images;
  Vec2 psi_dir = eval_g(2 * crit.k0, p, crit.nu0).inverse() * c.a3_vec1;
  Vec2 zeta_dir = eval_g0(p, crit.nu0).inverse() * c.a3_vec2;
  const Vec2 v0 = crit.v0();
  for (int i = 0; i < grid.n; ++i) {
    double xi = grid.x(i);
    double phi = 0, phi2 = 0;
    for (int m = -images; m <= images; ++m) {
      double v = sol.value(eps * (xi - m * L));
      phi += v;
      phi2 += v * v;
    }
    double c1 = std::cos(crit.k0 * xi), c2 = std::cos(2 * crit.k0 * xi);
    double e2 = eps * eps * (-0.5) * phi2;
    eta.under[i] = eps * phi * c1 * v0[0] + e2 * (psi_dir[0] * c2 + zeta_dir[0]);
    eta.over[i] = eps * phi * c1 * v0[1] + e2 * (psi_dir[1] * c2 + zeta_dir[1]);
  }
  return eta;
}

double mu_of_eps(const NlsCoefficients& c, const CriticalPoint& crit, const Params& p, const PeriodicGrid& grid,
                 double eps) {
  return crit.nu0 * eval_L(build_eta_star(c, crit, p, eps, grid), p).sum();
}

double eps_of_mu(const NlsCoefficients& c, const CriticalPoint& crit, const Params& p, const PeriodicGrid& grid,
                 double mu) {
  if (!(mu > 0)) throw ConfigError("mu must be positive");
  auto f = [&](double e) { return mu_of_eps(c, crit, p, grid, e) - mu; };
  // Bracket around the leading-order guess eps = mu.
  // Below eps_min the envelope tails overlap their periodic images.
  NlsCoefficients cc = c;
  const double eps_min = 2 * std::acosh(1e12) / (build_soliton(cc, 1.0, 2).decay_rate * grid.period) * (1 + 1e-9);
  double lo = std::max(0.5 * mu, eps_min), hi = std::max(2.0 * mu, 2 * lo);
  double flo = f(lo), fhi = f(hi);
  for (int it = 0; it < 60 && flo > 0 && lo > eps_min; ++it) {
    hi = lo; fhi = flo;
    lo = std::max(0.8 * lo, eps_min); flo = f(lo);
  }
  if (flo > 0) throw RegimeError("eps_of_mu: mu too small for the period; enlarge the grid");
  for (int it = 0; it < 60 && fhi < 0; ++it) {
    lo = hi; flo = fhi;
    hi *= 1.25; fhi = f(hi);
  }
  if (!(flo <= 0 && fhi >= 0)) throw NumericalError("eps_of_mu: could not bracket the inverse");
  // Safeguarded secant (regula falsi with Illinois modification).
  double a = lo, b = hi, fa = flo, fb = fhi;
  int side = 0;
  for (int it = 0; it < 200; ++it) {
    double xm = (a * fb - b * fa) / (fb - fa);
    if (!(xm > a && xm < b)) xm = 0.5 * (a + b);
    double fm = f(xm);
    if (std::abs(b - a) <= 1e-12 * xm || fm == 0.0) return xm;
    if ((fm < 0) == (fa < 0)) {
      a = xm; fa = fm;
      if (side == -1) fb *= 0.5;
      side = -1;
    } else {
      b = xm; fb = fm;
      if (side == 1) fa *= 0.5;
      side = 1;
    }
    if (std::abs(xm - a) <= 1e-13 * xm && std::abs(b - xm) <= 1e-13 * xm) return xm;
  }
  throw NumericalError("eps_of_mu: secant iteration did not converge");
}

}  // namespace twolayer
