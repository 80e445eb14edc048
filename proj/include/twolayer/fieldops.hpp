#pragma once

#include <functional>

#include "twolayer/nls.hpp"
#include "twolayer/spectral.hpp"

namespace twolayer {

// Interface (under) and free-surface (over) elevations on a shared grid.
struct ProfilePair {
  PeriodicGrid grid;
  Field under, over;

  static ProfilePair zero(const PeriodicGrid& g) { return {g, Field(g.n, 0.0), Field(g.n, 0.0)}; }

  ProfilePair& operator+=(const ProfilePair& o);
  ProfilePair& operator-=(const ProfilePair& o);
  ProfilePair& operator*=(double s);
  // Discrete L2 inner product of both components.
  double dot(const ProfilePair& o) const;
  double norm() const { return std::sqrt(dot(*this)); }
  // Discrete H^s norm of the pair.
  double sobolev_norm(int s) const;
  // Circular shift by whole grid steps: new[i] = old[i - shift].
  ProfilePair shifted(int shift) const;
};

ProfilePair operator+(ProfilePair a, const ProfilePair& b);
ProfilePair operator-(ProfilePair a, const ProfilePair& b);
ProfilePair operator*(double s, ProfilePair a);

Field apply_multiplier(const PeriodicGrid& g, const std::function<double(double)>& symbol, const Field& f);
ProfilePair apply_multiplier(const std::function<Matrix2(double)>& symbol, const ProfilePair& f);

// Value of the F̄ multiplier on the exact zero mode of the periodic grid.  `limit`
// uses the analytic limit F̄(0), the long-wave value seen by a modulated packet;
// `periodic` uses 0, which makes the truncation the Taylor expansion of the exact
// periodic functional (fluxes eta_x never excite the zero mode).
enum class ZeroMode { limit, periodic };

struct KValues {
  double total = 0, k2 = 0, k4 = 0;
};
struct LTerms {
  double l2 = 0, l3 = 0, l4 = 0;
  double sum() const { return l2 + l3 + l4; }
};

KValues eval_K(const ProfilePair& eta, const Params& p);
ProfilePair grad_K(const ProfilePair& eta, const Params& p);  // exact functional
ProfilePair grad_K2(const ProfilePair& eta, const Params& p);
ProfilePair grad_K4(const ProfilePair& eta, const Params& p);

LTerms eval_L_lower(const Field& eta_under, const PeriodicGrid& g);
LTerms eval_L_upper(const ProfilePair& eta, ZeroMode zm = ZeroMode::limit);
// The combined truncation: lower part plus rho times the upper part.
LTerms eval_L(const ProfilePair& eta, const Params& p, ZeroMode zm = ZeroMode::limit);

struct LGradients {
  ProfilePair g2, g3, g4;
  ProfilePair total() const { return g2 + g3 + g4; }
};
// Gradients of the separate pieces; the pair returned for the lower layer has a zero
// surface component.
LGradients grad_L_lower_parts(const Field& eta_under, const PeriodicGrid& g);
LGradients grad_L_upper_parts(const ProfilePair& eta, ZeroMode zm = ZeroMode::limit);
LGradients grad_L_parts(const ProfilePair& eta, const Params& p, ZeroMode zm = ZeroMode::limit);
ProfilePair grad_L_trunc(const ProfilePair& eta, const Params& p, ZeroMode zm = ZeroMode::limit);

// Symmetric bilinear forms with m(u,u) equal to the cubic-order gradient, and the
// trilinear forms with n(u,u,u) equal to the cubic-order functional.
Field m_lower(const Field& u1, const Field& u2, const PeriodicGrid& g);
ProfilePair m_upper(const ProfilePair& u1, const ProfilePair& u2, ZeroMode zm = ZeroMode::limit);
ProfilePair m_combined(const ProfilePair& u1, const ProfilePair& u2, const Params& p,
                       ZeroMode zm = ZeroMode::limit);
double n_lower(const Field& u1, const Field& u2, const Field& u3, const PeriodicGrid& g);
double n_upper(const ProfilePair& u1, const ProfilePair& u2, const ProfilePair& u3, ZeroMode zm = ZeroMode::limit);
double n_combined(const ProfilePair& u1, const ProfilePair& u2, const ProfilePair& u3, const Params& p,
                  ZeroMode zm = ZeroMode::limit);

struct FunctionalBreakdown {
  double k_total = 0, k2 = 0, k4 = 0;
  double l2 = 0, l3 = 0, l4 = 0, l_trunc = 0;
  double j_mu = 0, mu = 0;
};

struct JEvaluation {
  FunctionalBreakdown b;
  ProfilePair grad;
};

FunctionalBreakdown eval_J(const ProfilePair& eta, const Params& p, double mu, ZeroMode zm = ZeroMode::limit);
ProfilePair grad_J(const ProfilePair& eta, const Params& p, double mu, ZeroMode zm = ZeroMode::limit);
JEvaluation evaluate_J(const ProfilePair& eta, const Params& p, double mu, ZeroMode zm = ZeroMode::limit);

// Modulated-carrier test function with its second-harmonic and mean-flow corrections,
// periodised on the grid.  The envelope is centred at x = 0.
ProfilePair build_eta_star(const NlsCoefficients& c, const CriticalPoint& crit, const Params& p, double eps,
                           const PeriodicGrid& grid);
double mu_of_eps(const NlsCoefficients& c, const CriticalPoint& crit, const Params& p, const PeriodicGrid& grid,
                 double eps);
double eps_of_mu(const NlsCoefficients& c, const CriticalPoint& crit, const Params& p, const PeriodicGrid& grid,
                 double mu);

}  // namespace twolayer
