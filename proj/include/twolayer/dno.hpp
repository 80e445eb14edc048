#pragma once

#include "twolayer/fieldops.hpp"

namespace twolayer {

// Spectral-element discretisation of the two layer Neumann problems: Fourier
// collocation along the layer, Gauss-Lobatto-Legendre elements across it.
struct DnoOptions {
  int elements = 16;        // per layer, across the layer
  int order = 8;            // polynomial order of each element
  double lower_depth = 0;   // 0 selects four times the period
  double tol = 1e-12;       // relative residual of the preconditioned CG
  int max_iter = 4000;
  double min_thickness = 0.1;
};

struct DnoStats {
  int iter_lower = 0, iter_upper = 0;
  double res_lower = 0, res_upper = 0;
};

// Neumann-to-Dirichlet maps.  Fluxes are outward normal derivatives times arc length
// per unit horizontal length; the returned traces have zero mean.
Field ntd_lower(const Field& eta_under, const Field& flux_top, const PeriodicGrid& g, const DnoOptions& o = {},
                DnoStats* stats = nullptr);
void ntd_upper(const ProfilePair& eta, const Field& flux_bottom, const Field& flux_top, Field& trace_bottom,
               Field& trace_top, const DnoOptions& o = {}, DnoStats* stats = nullptr);

struct LExact {
  double under = 0, over = 0, total = 0;
  DnoStats stats;
};

// Full nonlinear L with the flux data given by the slopes of the two profiles.
LExact eval_L_exact(const ProfilePair& eta, const Params& p, const DnoOptions& o = {});

}  // namespace twolayer
