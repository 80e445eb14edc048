#include "twolayer/minimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>

namespace twolayer {

void MinimizeConfig::validate() const {
  if (!(mu > 0)) throw ConfigError("mu must be positive");
  if (!(mu < mu_ceiling)) throw ConfigError("mu must be below the ceiling " + std::to_string(mu_ceiling));
  if (max_iters < 0) throw ConfigError("max_iters must be non-negative");
  if (grad_tol < 0) throw ConfigError("grad_tol must be non-negative");
  if (!(admissibility_M > 0)) throw ConfigError("M must be positive");
  if (!(penalty_strength > 0)) throw ConfigError("penalty strength must be positive");
  if (history < 1) throw ConfigError("history must be at least 1");
  if (grid.n < 16) throw ConfigError("minimizer grid is not set");
}

std::string to_string(DescentError::Kind k) {
  switch (k) {
    case DescentError::Kind::line_search: return "line_search";
    case DescentError::Kind::iteration_cap: return "iteration_cap";
    case DescentError::Kind::out_of_cone: return "out_of_cone";
  }
  return "unknown";
}

namespace {

struct Eval {
  double phi = 0, barrier = 0, h2 = 0;
  FunctionalBreakdown b;
  ProfilePair grad;
};

// J_mu plus a quartic barrier on the H^2 norm that switches on at 0.9 M.
class Objective {
 public:
  Objective(const Params& p, const MinimizeConfig& cfg) : p_(p), mu_(cfg.mu), M_(cfg.admissibility_M),
                                                         kappa_(cfg.penalty_strength * cfg.mu), ops_(cfg.grid) {}

  Eval operator()(const ProfilePair& eta) const {
    Eval e;
    JEvaluation je = evaluate_J(eta, p_, mu_);
    e.b = je.b;
    e.grad = je.grad;
    e.h2 = eta.sobolev_norm(2);
    e.phi = je.b.j_mu;
    double s = e.h2 / M_;
    if (s > 0.9) {
      double t = (s - 0.9) / 0.1;
      e.barrier = kappa_ * t * t * t * t;
      double dphi_ds = 4 * kappa_ * t * t * t / 0.1;
      auto w = [](double k) { return (1 + k * k) * (1 + k * k); };
      ProfilePair wg{eta.grid, ops_.apply(eta.under, w), ops_.apply(eta.over, w)};
      e.grad += (dphi_ds / (M_ * e.h2)) * wg;
      e.phi += e.barrier;
    }
    return e;
  }

  double round_off(const Eval& e) const {
    return 64 * std::numeric_limits<double>::epsilon() * (std::abs(e.b.k_total) + std::abs(e.b.j_mu - e.b.k_total));
  }

 private:
  const Params& p_;
  double mu_, M_, kappa_;
  SpectralOps ops_;
};

// Inverse of the quadratic part P(k) - nu^2 F(k) of the Hessian, mode by mode.
class Preconditioner {
 public:
  Preconditioner(const PeriodicGrid& g, const Params& p, double nu) : ops_(g) {
    const int modes = g.n / 2;
    inv_.resize(modes);
    for (int j = 0; j < modes; ++j) {
      double k = g.wavenumber(j);
      Matrix2 P{1 - p.rho + p.beta_under * k * k, 0, 0, p.rho * (1 + p.beta_over * k * k)};
      Matrix2 F = eval_fbar(k) * p.rho;
      F.a11 += k;
      Matrix2 H = P - F * (nu * nu);
      bool spd = H.a11 > 0 && H.det() > 1e-12 * H.norm() * H.norm();
      inv_[j] = (spd ? H : P).inverse();
    }
  }

  ProfilePair apply(const ProfilePair& g) const {
    Spectrum su = ops_.forward(g.under), so = ops_.forward(g.over);
    for (size_t j = 0; j < inv_.size(); ++j) {
      const Matrix2& m = inv_[j];
      cplx a = su[j], b = so[j];
      su[j] = m.a11 * a + m.a12 * b;
      so[j] = m.a21 * a + m.a22 * b;
    }
    return {g.grid, ops_.inverse(su), ops_.inverse(so)};
  }

 private:
  SpectralOps ops_;
  std::vector<Matrix2> inv_;
};

// Index of the maximum of the interface envelope |eta + i H eta|.
int envelope_peak(const Field& f) {
  const int n = static_cast<int>(f.size());
  Fft fft(n);
  Spectrum s = fft.forward(f);
  s[0] = 0;
  s[n / 2] = 0;
  for (int j = 1; j < n / 2; ++j) s[j] *= cplx(0, -1);
  Field h = fft.inverse(s);
  int best = 0;
  double bv = -1;
  for (int i = 0; i < n; ++i) {
    double v = f[i] * f[i] + h[i] * h[i];
    if (v > bv) {
      bv = v;
      best = i;
    }
  }
  return best;
}

struct Pair {
  ProfilePair s, y;
  double rho;
};

ProfilePair lbfgs_direction(const std::deque<Pair>& mem, const ProfilePair& g, const Preconditioner& H0) {
  ProfilePair q = g;
  std::vector<double> alpha(mem.size());
  for (int i = static_cast<int>(mem.size()) - 1; i >= 0; --i) {
    alpha[i] = mem[i].rho * mem[i].s.dot(q);
    q -= alpha[i] * mem[i].y;
  }
  ProfilePair r = H0.apply(q);
  for (size_t i = 0; i < mem.size(); ++i) {
    double beta = mem[i].rho * mem[i].y.dot(r);
    r += (alpha[i] - beta) * mem[i].s;
  }
  r *= -1.0;
  return r;
}

void fill_result(MinimizeResult& r, const ProfilePair& eta, const Eval& e, int iters) {
  r.eta = eta;
  r.breakdown = e.b;
  r.speed = e.b.mu / e.b.l_trunc;
  r.iterations = iters;
  r.final_grad_norm = e.grad.norm();
}

double exact_J(const ProfilePair& eta, const Params& p, double mu, const DnoOptions& o, double* L = nullptr) {
  double l = eval_L_exact(eta, p, o).total;
  if (L) *L = l;
  return eval_K(eta, p).total + mu * mu / l;
}

// A few descent steps on K + mu^2/L_exact restricted to the span of the recent
// quasi-Newton steps and the current gradient, with gradients by central differences.
void refine_with_exact_L(MinimizeResult& r, const Params& p, const MinimizeConfig& cfg, const std::deque<Pair>& mem,
                         const ProfilePair& grad) {
  std::vector<ProfilePair> basis;
  auto add = [&](ProfilePair v) {
    for (auto& b : basis) v -= v.dot(b) * b;
    double n = v.norm();
    if (n > 1e-12) basis.push_back((1.0 / n) * v);
  };
  add(grad);
  for (auto it = mem.rbegin(); it != mem.rend(); ++it) add(it->s);
  if (basis.empty()) return;
  const double mu = cfg.mu;
  ProfilePair eta = r.eta;
  double L;
  double J = exact_J(eta, p, mu, cfg.dno, &L);
  const double h = 1e-3 * eta.norm() / std::sqrt(static_cast<double>(basis.size()));
  for (int step = 0; step < cfg.refinement_steps; ++step) {
    std::vector<double> gs(basis.size());
    ProfilePair d = ProfilePair::zero(eta.grid);
    for (size_t i = 0; i < basis.size(); ++i) {
      double jp = exact_J(eta + h * basis[i], p, mu, cfg.dno), jm = exact_J(eta - h * basis[i], p, mu, cfg.dno);
      gs[i] = (jp - jm) / (2 * h);
      d -= gs[i] * basis[i];
    }
    double gn = d.norm();
    if (gn == 0) break;
    // Initial trial moves by one difference step along the normalised direction.
    double t = h / gn;
    bool moved = false;
    for (int ls = 0; ls < 30; ++ls, t *= 0.5) {
      ProfilePair trial = eta + t * d;
      double Lt;
      double Jt = exact_J(trial, p, mu, cfg.dno, &Lt);
      if (Jt < J) {
        eta = trial;
        J = Jt;
        L = Lt;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  r.eta = eta;
  r.speed = mu / L;
  r.breakdown = eval_J(eta, p, mu);
  r.refined = true;
}

}  // namespace

MinimizeResult minimize(const Params& p, const NlsCoefficients& c, const CriticalPoint& crit,
                        const MinimizeConfig& cfg) {
  cfg.validate();
  if (!c.focusing) throw RegimeError("minimization needs the focusing regime");
  const PeriodicGrid& g = cfg.grid;
  MinimizeResult res;
  res.eps = eps_of_mu(c, crit, p, g, cfg.mu);
  ProfilePair eta = build_eta_star(c, crit, p, res.eps, g);
  Objective obj(p, cfg);
  Eval cur;
  try {
    cur = obj(eta);
  } catch (const RegimeError& e) {
    fill_result(res, eta, cur, 0);
    throw DescentError(DescentError::Kind::out_of_cone, e.what(), res);
  }
  res.j_initial = cur.b.j_mu;
  const double tol = cfg.tolerance();
  const double speed0 = cfg.mu / cur.b.l_trunc;
  Preconditioner H0(g, p, std::min(speed0, crit.nu0 * (1 - 1e-3)));
  std::deque<Pair> mem;
  int since_reset = 0;
  auto record = [&](int it, double step) {
    res.log.push_back({it, cur.b.j_mu, cur.grad.norm(), step, cfg.mu / cur.b.l_trunc, cur.h2});
  };
  record(0, 0.0);
  res.boundary_hit = cur.h2 > 0.9 * cfg.admissibility_M;
  int it = 0;
  for (; it < cfg.max_iters; ++it) {
    double gn = cur.grad.norm();
    if (gn <= tol && cur.barrier == 0) {
      res.converged = true;
      break;
    }
    ProfilePair d = lbfgs_direction(mem, cur.grad, H0);
    double slope = cur.grad.dot(d);
    if (!(slope < 0)) {
      mem.clear();
      d = -1.0 * H0.apply(cur.grad);
      slope = cur.grad.dot(d);
    }
    double t = 1.0;
    bool accepted = false;
    Eval trial;
    ProfilePair next;
    for (int ls = 0; ls < 60; ++ls) {
      next = eta + t * d;
      bool ok = next.sobolev_norm(2) < cfg.admissibility_M;
      if (ok) {
        try {
          trial = obj(next);
        } catch (const RegimeError&) {
          ok = false;
        }
      }
      if (!ok) {
        t *= 0.5;
        continue;
      }
      // When the predicted decrease is below the rounding level of J the Armijo test
      // is noise; decide on the directional derivative instead (approximate Wolfe).
      const double noise = obj.round_off(cur);
      if (std::abs(t * slope) > 100 * noise) {
        if (trial.phi <= cur.phi + 1e-4 * t * slope) {
          accepted = true;
          break;
        }
        t *= 0.5;
        continue;
      }
      if (trial.phi > cur.phi + noise) {
        t *= 0.5;
        continue;
      }
      const double dslope = trial.grad.dot(d);
      if (dslope <= -0.9 * slope) {
        accepted = true;
        break;
      }
      // Overshot the line minimum: secant step on the derivative.
      t = std::clamp(t * slope / (slope - dslope), 0.1 * t, 0.9 * t);
    }
    if (!accepted) {
      if (!mem.empty() && since_reset > 0) {
        mem.clear();
        since_reset = 0;
        continue;
      }
      fill_result(res, eta, cur, it);
      throw DescentError(DescentError::Kind::line_search,
                         "line search failed at iteration " + std::to_string(it) + " (gradient norm " +
                             std::to_string(gn) + ")",
                         res);
    }
    ProfilePair s = next - eta, y = trial.grad - cur.grad;
    double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      mem.push_back({s, y, 1.0 / sy});
      if (static_cast<int>(mem.size()) > cfg.history) mem.pop_front();
    }
    ++since_reset;
    eta = next;
    cur = trial;
    if (cur.h2 > 0.9 * cfg.admissibility_M) res.boundary_hit = true;
    // Quotient out translations: keep the envelope peak at x = 0.
    int shift = g.n / 2 - envelope_peak(eta.under);
    if (shift != 0) {
      eta = eta.shifted(shift);
      cur.grad = cur.grad.shifted(shift);
      for (auto& m : mem) {
        m.s = m.s.shifted(shift);
        m.y = m.y.shifted(shift);
      }
    }
    record(it + 1, t);
  }
  if (!res.converged && cur.grad.norm() <= tol && cur.barrier == 0) res.converged = true;
  fill_result(res, eta, cur, it);
  if (cfg.max_iters == 0) return res;
  if (!res.converged)
    throw DescentError(DescentError::Kind::iteration_cap,
                       "iteration cap reached with gradient norm " + std::to_string(res.final_grad_norm), res);
  if (cfg.use_exact_L_refinement) refine_with_exact_L(res, p, cfg, mem, cur.grad);
  return res;
}

double wave_speed(const MinimizeResult& r) { return r.speed; }

SpeedFit speed_expansion_check(const std::vector<MinimizeResult>& runs, const Params& p, const CriticalPoint& crit,
                               const NlsCoefficients& c) {
  std::set<double> distinct;
  for (auto& r : runs) distinct.insert(r.breakdown.mu);
  if (runs.size() < 3 || distinct.size() < 3) throw ConfigError("speed fit needs at least three distinct mu values");
  std::vector<std::pair<double, double>> pts;
  for (auto& r : runs) {
    double mu = r.breakdown.mu;
    pts.push_back({mu, (r.speed - crit.nu0) / (mu * mu)});
  }
  std::sort(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.first > b.first; });
  SpeedFit f;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(pts.size());
  for (auto& [m, q] : pts) {
    f.mu.push_back(m);
    f.ratio.push_back(q);
    sx += m;
    sy += q;
    sxx += m * m;
    sxy += m * q;
  }
  f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.constant = (sy - f.slope * sx) / n;
  Vec2 v0 = crit.v0();
  f.predicted = 2.0 * c.nu_nls / (crit.nu0 * eval_PF(crit.k0, p).second.quad(v0));
  f.rel_error = std::abs(f.constant - f.predicted) / std::abs(f.predicted);
  bool inc = true, dec = true;
  for (size_t i = 1; i < f.ratio.size(); ++i) {
    inc = inc && f.ratio[i] >= f.ratio[i - 1];
    dec = dec && f.ratio[i] <= f.ratio[i - 1];
  }
  f.monotone = inc || dec;
  return f;
}

}  // namespace twolayer
