#pragma once

#include <string>
#include <vector>

#include "twolayer/dno.hpp"
#include "twolayer/errors.hpp"
#include "twolayer/fieldops.hpp"

namespace twolayer {

struct MinimizeConfig {
  double mu = 2e-3;
  PeriodicGrid grid;
  int max_iters = 4000;
  double grad_tol = 0;          // 0 selects 1e-9 * mu
  double admissibility_M = 0.5;  // radius of the H^2 ball
  double penalty_strength = 1.0;
  bool use_exact_L_refinement = false;
  double mu_ceiling = 1e-2;
  int history = 12;
  int refinement_steps = 3;
  DnoOptions dno;

  double tolerance() const { return grad_tol > 0 ? grad_tol : 1e-9 * mu; }
  void validate() const;
};

struct IterationRecord {
  int iter = 0;
  double j = 0, grad_norm = 0, step = 0, speed = 0, h2_norm = 0;
};

struct MinimizeResult {
  ProfilePair eta;
  FunctionalBreakdown breakdown;
  double speed = 0;  // mu / L
  int iterations = 0;
  double final_grad_norm = 0;
  bool boundary_hit = false;
  bool converged = false;
  bool refined = false;
  double j_initial = 0;
  double eps = 0;  // amplitude parameter of the starting test function
  std::vector<IterationRecord> log;
};

// Descent failures carry the last iterate.
struct DescentError : NumericalError {
  enum class Kind { line_search, iteration_cap, out_of_cone };
  DescentError(Kind k, const std::string& what, MinimizeResult last)
      : NumericalError(what), kind(k), last(std::move(last)) {}
  Kind kind;
  MinimizeResult last;
};
std::string to_string(DescentError::Kind k);

// Limited-memory quasi-Newton descent on J_mu from the test function eta*(eps(mu)).
MinimizeResult minimize(const Params& p, const NlsCoefficients& c, const CriticalPoint& crit,
                        const MinimizeConfig& cfg);

double wave_speed(const MinimizeResult& r);

// Least-squares fit of (nu - nu0)/mu^2 = constant + slope * mu.
struct SpeedFit {
  double constant = 0, slope = 0, predicted = 0, rel_error = 0;
  bool monotone = false;
  std::vector<double> mu, ratio;
};
SpeedFit speed_expansion_check(const std::vector<MinimizeResult>& runs, const Params& p, const CriticalPoint& crit,
                               const NlsCoefficients& c);

}  // namespace twolayer
