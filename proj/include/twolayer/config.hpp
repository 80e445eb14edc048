#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "twolayer/dispersion.hpp"
#include "twolayer/minimizer.hpp"

namespace twolayer {

// Flat "[section]" / "key = value" files; '#' and ';' start comments.
struct IniEntry {
  std::string value;
  int line = 0;
};
using IniSection = std::map<std::string, IniEntry>;
using IniFile = std::map<std::string, IniSection>;

IniFile parse_ini(const std::string& text);

enum class ScanRefine { none, double_minimum, degenerate };

struct RunConfig {
  Params params;
  // [grid]
  int n = 4096;
  int k0_multiples = 32;
  int strip_ny = 128;        // vertical intervals per layer of the potential-flow solver
  double depth_under = 0;    // 0 selects four periods
  // [minimize]
  double mu = 2e-3;
  int max_iters = 4000;
  double grad_tol = 0;       // 0 selects 1e-9 * mu
  double M = 0.5;
  bool use_exact_refinement = false;
  double mu_ceiling = 1e-2;
  // [scan]
  ScanWindow scan;
  ScanRefine refine = ScanRefine::none;
  double beta_lo = 0.04, beta_hi = 0.07;  // beta_over range for the double-minimum search
  // [validate]
  int validate_nx = 256;
  int validate_samples = 10;
};

// Every value is checked against the module invariants; errors carry the line.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

DnoOptions dno_options(const RunConfig& rc);
MinimizeConfig minimize_config(const RunConfig& rc, const CriticalPoint& crit);

}  // namespace twolayer
