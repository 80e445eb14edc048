#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <future>
#include <iostream>
#include <sstream>

#include "twolayer/config.hpp"
#include "twolayer/io.hpp"
#include "twolayer/minimizer.hpp"
#include "twolayer/validation.hpp"

using namespace twolayer;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0, kConfig = 1, kGate = 2, kNumerical = 3;

struct Options {
  std::string config, out, sweep;
  bool require_valid = false, seedless = false;
};

// Gate failures exit 2 with the report attached.
struct GateFailure {
  Json report;
};

struct Resolved {
  Params params;
  AssumptionReport report;
  Json extra = Json::object();
};

Resolved resolve(const RunConfig& rc) {
  Resolved r;
  r.params = rc.params;
  switch (rc.refine) {
    case ScanRefine::none:
      break;
    case ScanRefine::degenerate:
      r.params = locate_degenerate(rc.params, 1.0);
      r.extra["refined_from"] = to_json(rc.params);
      break;
    case ScanRefine::double_minimum: {
      DoubleMinimumBracket b = bracket_double_minimum(rc.params, rc.beta_lo, rc.beta_hi, 1e-3, rc.scan);
      r.params.beta_over = b.beta_star;
      r.extra["bracket"] = Json{{"lo", b.lo}, {"hi", b.hi}, {"width", b.hi - b.lo}, {"beta_star", b.beta_star}};
      break;
    }
  }
  r.report = find_critical(r.params, rc.scan);
  return r;
}

Json summary(const Resolved& r) {
  Json j{{"params", to_json(r.params)}, {"assumption", to_json(r.report)}};
  for (auto it = r.extra.begin(); it != r.extra.end(); ++it) j[it.key()] = it.value();
  return j;
}

Resolved require_valid(const RunConfig& rc) {
  Resolved r = resolve(rc);
  if (r.report.verdict != Verdict::Valid) throw GateFailure{summary(r)};
  return r;
}

NlsCoefficients require_focusing(const Resolved& r) {
  NlsCoefficients c = compute_nls(r.params, r.report.crit);
  if (!c.focusing) {
    Json j = summary(r);
    j["coefficients"] = to_json(c);
    j["error"] = "defocusing coefficients: no solitary-wave branch";
    throw GateFailure{j};
  }
  return c;
}

void emit(const Json& j, const std::string& out) {
  std::string text = dump_json(j);
  if (!out.empty()) write_file_atomic(out, text);
  std::cout << text;
}

int cmd_dispersion(const RunConfig& rc, const Options& o) {
  Resolved r = resolve(rc);
  Json j = summary(r);
  if (!o.out.empty()) {
    const ScanWindow& w = rc.scan;
    std::vector<double> k(w.samples), lm(w.samples), lp(w.samples), d(w.samples);
    for (int i = 0; i < w.samples; ++i) {
      k[i] = w.k_min * std::pow(w.k_max / w.k_min, static_cast<double>(i) / (w.samples - 1));
      Lambda l = eval_lambda(k[i], r.params);
      lm[i] = l.minus;
      lp[i] = l.plus;
      d[i] = l.D;
    }
    write_file_atomic(o.out, table_csv({"k", "lambda_minus", "lambda_plus", "D"}, {k, lm, lp, d}));
    fs::path side = o.out;
    side.replace_extension(".json");
    write_file_atomic(side, dump_json(j));
  }
  std::cout << dump_json(j);
  if (o.require_valid && r.report.verdict != Verdict::Valid) return kGate;
  return kOk;
}

int cmd_coeffs(const RunConfig& rc, const Options& o) {
  Resolved r = require_valid(rc);
  NlsCoefficients c = compute_nls(r.params, r.report.crit);
  Json j{{"k0", r.report.crit.k0}, {"nu0", r.report.crit.nu0}, {"a", r.report.crit.a}};
  Json cj = to_json(c);
  for (auto it = cj.begin(); it != cj.end(); ++it) j[it.key()] = it.value();
  j["params"] = to_json(r.params);
  emit(j, o.out);
  return kOk;
}

int cmd_soliton(const RunConfig& rc, const Options& o) {
  Resolved r = require_valid(rc);
  NlsCoefficients c = require_focusing(r);
  SolitonProfile s = build_soliton(c);
  double mass = 0;
  for (size_t i = 0; i + 1 < s.x.size(); ++i)
    mass += 0.5 * (s.phi[i] * s.phi[i] + s.phi[i + 1] * s.phi[i + 1]) * (s.x[i + 1] - s.x[i]);
  Json j{{"amplitude", s.amplitude}, {"decay_rate", s.decay_rate}, {"alpha", c.alpha},
         {"nu_nls", s.nu_nls},       {"i_nls", s.i_nls},           {"mass", mass}};
  if (!o.out.empty()) {
    write_file_atomic(o.out, table_csv({"x", "phi"}, {s.x, s.phi}));
    fs::path side = o.out;
    side.replace_extension(".json");
    write_file_atomic(side, dump_json(j));
  }
  std::cout << dump_json(j);
  return kOk;
}

void write_profile(const fs::path& dir, const ProfilePair& eta) {
  write_file_atomic(dir / "profile.csv", profile_csv(eta));
  write_file_atomic(dir / "profile.json", dump_json(profile_sidecar(eta.grid)));
}

int cmd_ansatz(const RunConfig& rc, const Options& o) {
  Resolved r = require_valid(rc);
  NlsCoefficients c = require_focusing(r);
  const CriticalPoint& crit = r.report.crit;
  PeriodicGrid g = PeriodicGrid::around_carrier(rc.n, crit.k0, rc.k0_multiples);
  double eps = eps_of_mu(c, crit, r.params, g, rc.mu);
  ProfilePair eta = build_eta_star(c, crit, r.params, eps, g);
  FunctionalBreakdown b = eval_J(eta, r.params, rc.mu);
  Json j{{"mu", rc.mu}, {"eps", eps}, {"speed", rc.mu / b.l_trunc}, {"two_nu0_mu", 2 * crit.nu0 * rc.mu},
         {"breakdown", to_json(b)}, {"grid", profile_sidecar(g)}};
  if (!o.out.empty()) {
    write_profile(o.out, eta);
    write_file_atomic(fs::path(o.out) / "ansatz.json", dump_json(j));
  }
  std::cout << dump_json(j);
  return kOk;
}

Json result_json(const MinimizeResult& m, const CriticalPoint& crit) {
  return Json{{"mu", m.breakdown.mu},
              {"eps", m.eps},
              {"speed", m.speed},
              {"nu0", crit.nu0},
              {"two_nu0_mu", 2 * crit.nu0 * m.breakdown.mu},
              {"j_initial", m.j_initial},
              {"iterations", m.iterations},
              {"final_grad_norm", m.final_grad_norm},
              {"converged", m.converged},
              {"boundary_hit", m.boundary_hit},
              {"refined", m.refined},
              {"breakdown", to_json(m.breakdown)}};
}

void write_run(const fs::path& dir, const MinimizeResult& m, const Json& j) {
  write_profile(dir, m.eta);
  std::vector<std::vector<double>> cols(6);
  for (const auto& rec : m.log) {
    cols[0].push_back(rec.iter);
    cols[1].push_back(rec.j);
    cols[2].push_back(rec.grad_norm);
    cols[3].push_back(rec.step);
    cols[4].push_back(rec.speed);
    cols[5].push_back(rec.h2_norm);
  }
  write_file_atomic(dir / "iterations.csv", table_csv({"iter", "J", "grad_norm", "step", "speed", "h2_norm"}, cols));
  write_file_atomic(dir / "result.json", dump_json(j));
}

std::vector<double> parse_sweep(const std::string& s) {
  std::vector<double> mus;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    double v = std::strtod(item.c_str(), &end);
    if (item.empty() || *end != '\0' || !(v > 0)) throw ConfigError("--sweep: bad value '" + item + "'");
    mus.push_back(v);
  }
  if (mus.empty()) throw ConfigError("--sweep needs at least one value");
  return mus;
}

int cmd_minimize(const RunConfig& rc, const Options& o) {
  Resolved r = require_valid(rc);
  NlsCoefficients c = require_focusing(r);
  const CriticalPoint& crit = r.report.crit;
  const fs::path out = o.out.empty() ? fs::path(".") : fs::path(o.out);
  std::vector<double> mus = o.sweep.empty() ? std::vector<double>{rc.mu} : parse_sweep(o.sweep);
  std::vector<MinimizeConfig> cfgs;
  for (double mu : mus) {
    RunConfig one = rc;
    one.mu = mu;
    cfgs.push_back(minimize_config(one, crit));
    cfgs.back().validate();
  }
  // Independent runs share nothing, so a sweep runs them concurrently.
  std::vector<std::future<MinimizeResult>> jobs;
  for (const auto& cfg : cfgs)
    jobs.push_back(std::async(std::launch::async, [&, cfg] { return minimize(r.params, c, crit, cfg); }));
  std::vector<MinimizeResult> runs;
  Json all = Json::array();
  int status = kOk;
  for (size_t i = 0; i < jobs.size(); ++i) {
    char tag[32];
    std::snprintf(tag, sizeof tag, "mu_%g", mus[i]);
    fs::path dir = mus.size() == 1 ? out : out / tag;
    try {
      MinimizeResult m = jobs[i].get();
      Json j = result_json(m, crit);
      write_run(dir, m, j);
      all.push_back(j);
      runs.push_back(std::move(m));
    } catch (const DescentError& e) {
      Json j = result_json(e.last, crit);
      j["error"] = to_string(e.kind);
      j["message"] = e.what();
      write_run(dir, e.last, j);
      all.push_back(j);
      status = kNumerical;
    }
  }
  Json top{{"params", to_json(r.params)}, {"runs", all}};
  if (mus.size() > 1 && status == kOk) {
    SpeedFit f = speed_expansion_check(runs, r.params, crit, c);
    top["speed_fit"] = Json{{"constant", f.constant}, {"slope", f.slope},         {"predicted", f.predicted},
                            {"rel_error", f.rel_error}, {"monotone", f.monotone}, {"mu", f.mu},
                            {"ratio", f.ratio}};
  }
  write_file_atomic(out / (mus.size() > 1 ? "sweep.json" : "summary.json"), dump_json(top));
  std::cout << dump_json(top);
  return status;
}

int cmd_validate(const RunConfig& rc, const Options& o) {
  Resolved r = require_valid(rc);
  const CriticalPoint& crit = r.report.crit;
  DnoOptions dno = dno_options(rc);
  SymbolCheck sym = flat_symbol_check(r.params, crit.k0, {1, 2, 3}, rc.validate_nx, dno);
  TruncationCheck tp = truncation_order(r.params, crit, {0.2, 0.1, 0.05}, rc.validate_nx, ZeroMode::periodic, dno);
  TruncationCheck tl = truncation_order(r.params, crit, {0.2, 0.1, 0.05}, rc.validate_nx, ZeroMode::limit, dno);
  PeriodicGrid g = PeriodicGrid::around_carrier(1024, crit.k0, 8);
  GradientCheck gc = gradient_check(r.params, crit, g, rc.mu, rc.validate_samples, 1);
  const bool ok_sym = sym.worst <= 1e-8, ok_trunc = tp.slope >= 4.5,
             ok_grad = std::max({gc.worst_L, gc.worst_K, gc.worst_J}) <= 1e-6;
  Json j{{"flat_symbols", Json{{"k", sym.k}, {"rel_error", sym.rel_error}, {"pass", ok_sym}}},
         {"truncation", Json{{"eps", tp.eps}, {"remainder", tp.remainder}, {"slope", tp.slope}, {"pass", ok_trunc}}},
         {"truncation_mean_limit", Json{{"eps", tl.eps}, {"remainder", tl.remainder}, {"slope", tl.slope}}},
         {"gradients", Json{{"samples", gc.samples}, {"L", gc.worst_L}, {"K", gc.worst_K}, {"J", gc.worst_J},
                            {"pass", ok_grad}}}};
  emit(j, o.out);
  return ok_sym && ok_trunc && ok_grad ? kOk : kNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-layer gravity-capillary solitary waves: dispersion, coefficients, minimization"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", o.out, "output file or directory");
  app.add_flag("--require-valid", o.require_valid, "exit 2 unless the dispersion verdict is Valid");
  app.add_option("--sweep", o.sweep, "comma separated mu values for minimize");
  app.add_flag("--seedless", o.seedless, "reserved; every command is deterministic");
  using Cmd = int (*)(const RunConfig&, const Options&);
  std::vector<std::pair<CLI::App*, Cmd>> cmds = {
      {app.add_subcommand("dispersion", "scan the slow and fast branches"), cmd_dispersion},
      {app.add_subcommand("coeffs", "reduction coefficients at the critical wavenumber"), cmd_coeffs},
      {app.add_subcommand("soliton", "solitary-wave profile of the reduced equation"), cmd_soliton},
      {app.add_subcommand("ansatz", "modulated test function at the configured mu"), cmd_ansatz},
      {app.add_subcommand("minimize", "descent on the constrained energy"), cmd_minimize},
      {app.add_subcommand("validate", "oracle discrepancies and truncation orders"), cmd_validate}};
  for (auto& [sub, fn] : cmds) sub->fallthrough();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }
  try {
    RunConfig rc = o.config.empty() ? RunConfig{} : load_config(o.config);
    for (auto& [sub, fn] : cmds)
      if (sub->parsed()) return fn(rc, o);
  } catch (const GateFailure& g) {
    std::cout << dump_json(g.report);
    return kGate;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const RegimeError& e) {
    std::cerr << "regime error: " << e.what() << "\n";
    return kGate;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
  return kConfig;
}
