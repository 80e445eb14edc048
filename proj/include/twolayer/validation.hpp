#pragma once

#include <cstdint>
#include <vector>

#include "twolayer/dno.hpp"

namespace twolayer {

// Flat-geometry Neumann-to-Dirichlet maps against the closed-form symbols,
// one entry per wavenumber: the worst relative error over the five entries.
struct SymbolCheck {
  std::vector<double> k, rel_error;
  double worst = 0;
};
SymbolCheck flat_symbol_check(const Params& p, double k0, const std::vector<int>& harmonics, int nx,
                              const DnoOptions& o = {});

// The smooth pair used for remainder scaling: carrier along v0 with two harmonics.
ProfilePair smooth_test_pair(const CriticalPoint& crit, const PeriodicGrid& g);

// |L_exact - (L2+L3+L4)| at eta = eps * smooth pair and its fitted log-log slope.
struct TruncationCheck {
  std::vector<double> eps, remainder;
  double slope = 0;
};
TruncationCheck truncation_order(const Params& p, const CriticalPoint& crit, const std::vector<double>& eps,
                                 int nx, ZeroMode zm, const DnoOptions& o = {});

// Random band-limited pair with H^2 norm `h2` (deterministic for a seed).
ProfilePair random_pair(const PeriodicGrid& g, double k_band, double h2, std::uint64_t seed);

// Central differences along random directions versus the analytic gradients.
struct GradientCheck {
  double worst_L = 0, worst_K = 0, worst_J = 0;
  int samples = 0;
};
GradientCheck gradient_check(const Params& p, const CriticalPoint& crit, const PeriodicGrid& g, double mu,
                             int samples, std::uint64_t seed);

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace twolayer
