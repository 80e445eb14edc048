#pragma once

#include <vector>

#include "twolayer/dispersion.hpp"

namespace twolayer {

struct NlsCoefficients {
  double a2 = 0, a3 = 0, a4 = 0;
  Vec2 a3_vec1{}, a3_vec2{};
  double a4_1 = 0, a4_2 = 0;
  double alpha = 0, nu_nls = 0, i_nls = 0;
  bool focusing = false;

  // The cubic coefficient that decides the regime.
  double cubic() const { return 0.5 * a3 + a4; }
};

struct A3Terms {
  double a3;
  Vec2 vec1, vec2;
};

struct A4Terms {
  double a4, a4_1, a4_2;
  double a4_2_under, a4_2_over;
};

// The sub-expressions of the second-harmonic / mean-flow forcing, kept separate so
// each can be checked on its own.
namespace a3_blocks {
double c1(double k0, double a);  // Fbar11(k0) - a Fbar12(k0)
double c2(double k0, double a);  // Fbar21(k0) - a Fbar22(k0)
Vec2 harmonic_diag(const Params& p, const CriticalPoint& c);   // second harmonic, intra-row terms
Vec2 harmonic_cross(const Params& p, const CriticalPoint& c);  // second harmonic, cross terms
Vec2 harmonic_lower(const CriticalPoint& c);                   // lower-layer contribution
Vec2 mean_diag(const Params& p, const CriticalPoint& c);
Vec2 mean_cross(const Params& p, const CriticalPoint& c);
}  // namespace a3_blocks

A3Terms compute_a3(const Params& p, const CriticalPoint& c);
A4Terms compute_a4(const Params& p, const CriticalPoint& c);
bool check_focusing(double a3, double a4);
double eval_alpha(const Params& p, const CriticalPoint& c);

// All coefficients for a Valid critical point.
NlsCoefficients compute_nls(const Params& p, const CriticalPoint& c);

struct SolitonProfile {
  double amplitude = 0, decay_rate = 0;
  double nu_nls = 0, i_nls = 0;
  std::vector<double> x, phi;

  double value(double s) const;
  double d1(double s) const;
  double d2(double s) const;
};

// half_width <= 0 selects 25/decay_rate.
SolitonProfile build_soliton(const NlsCoefficients& c, double half_width = 0.0, int n = 4096);

}  // namespace twolayer
