#include "twolayer/config.hpp"

#include <cerrno>
#include <climits>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "twolayer/errors.hpp"

namespace twolayer {

namespace {

std::string trim(const std::string& s) {
  const char* ws = " \t\r";
  size_t a = s.find_first_not_of(ws);
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(ws);
  return s.substr(a, b - a + 1);
}

double parse_double(const IniEntry& e, const std::string& key) {
  const char* s = e.value.c_str();
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(s, &end);
  if (end == s || *end != '\0' || errno == ERANGE || !std::isfinite(v))
    throw ConfigError("line " + std::to_string(e.line) + ": " + key + " is not a number: '" + e.value + "'", e.line);
  return v;
}

int parse_int(const IniEntry& e, const std::string& key) {
  const char* s = e.value.c_str();
  char* end = nullptr;
  errno = 0;
  long v = std::strtol(s, &end, 10);
  if (end == s || *end != '\0' || errno == ERANGE || v < INT_MIN || v > INT_MAX)
    throw ConfigError("line " + std::to_string(e.line) + ": " + key + " is not an integer: '" + e.value + "'", e.line);
  return static_cast<int>(v);
}

bool parse_bool(const IniEntry& e, const std::string& key) {
  if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
  if (e.value == "false" || e.value == "0" || e.value == "no") return false;
  throw ConfigError("line " + std::to_string(e.line) + ": " + key + " must be true or false", e.line);
}

void require(bool ok, const IniEntry& e, const std::string& key, const std::string& rule) {
  if (!ok) throw ConfigError("line " + std::to_string(e.line) + ": " + key + " " + rule, e.line);
}

}  // namespace

IniFile parse_ini(const std::string& text) {
  IniFile ini;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    size_t c = s.find_first_of("#;");
    if (c != std::string::npos) s.erase(c);
    s = trim(s);
    if (s.empty()) continue;
    auto fail = [&](const std::string& why) {
      throw ConfigError("line " + std::to_string(line) + ": " + why, line);
    };
    if (s.front() == '[') {
      if (s.back() != ']') fail("unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty()) fail("empty section name");
      if (ini.count(section)) fail("duplicate section [" + section + "]");
      ini[section];
      continue;
    }
    size_t eq = s.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    if (section.empty()) fail("key outside of a section");
    std::string key = trim(s.substr(0, eq)), value = trim(s.substr(eq + 1));
    if (key.empty()) fail("empty key");
    if (value.empty()) fail("empty value for " + key);
    auto& sec = ini[section];
    if (sec.count(key)) fail("duplicate key " + key);
    sec[key] = {value, line};
  }
  return ini;
}

RunConfig parse_config(const std::string& text) {
  IniFile ini = parse_ini(text);
  RunConfig rc;
  using Handler = std::function<void(const IniEntry&, const std::string&)>;
  const std::map<std::string, std::map<std::string, Handler>> schema = {
      {"params",
       {{"rho",
         [&](const IniEntry& e, const std::string& k) {
           rc.params.rho = parse_double(e, k);
           require(rc.params.rho > 0 && rc.params.rho < 1, e, k, "must lie in (0, 1)");
         }},
        {"beta_under",
         [&](const IniEntry& e, const std::string& k) {
           rc.params.beta_under = parse_double(e, k);
           require(rc.params.beta_under > 0, e, k, "must be positive");
         }},
        {"beta_over",
         [&](const IniEntry& e, const std::string& k) {
           rc.params.beta_over = parse_double(e, k);
           require(rc.params.beta_over > 0, e, k, "must be positive");
         }}}},
      {"grid",
       {{"n",
         [&](const IniEntry& e, const std::string& k) {
           rc.n = parse_int(e, k);
           require(rc.n >= 16 && (rc.n & (rc.n - 1)) == 0, e, k, "must be a power of two, at least 16");
         }},
        {"k0_multiples",
         [&](const IniEntry& e, const std::string& k) {
           rc.k0_multiples = parse_int(e, k);
           require(rc.k0_multiples >= 1, e, k, "must be at least 1");
         }},
        {"strip_ny",
         [&](const IniEntry& e, const std::string& k) {
           rc.strip_ny = parse_int(e, k);
           require(rc.strip_ny >= 8 && rc.strip_ny % 8 == 0, e, k, "must be a positive multiple of 8");
         }},
        {"depth_under",
         [&](const IniEntry& e, const std::string& k) {
           rc.depth_under = parse_double(e, k);
           require(rc.depth_under >= 0, e, k, "must be non-negative");
         }}}},
      {"minimize",
       {{"mu",
         [&](const IniEntry& e, const std::string& k) {
           rc.mu = parse_double(e, k);
           require(rc.mu > 0, e, k, "must be positive");
         }},
        {"max_iters",
         [&](const IniEntry& e, const std::string& k) {
           rc.max_iters = parse_int(e, k);
           require(rc.max_iters >= 0, e, k, "must be non-negative");
         }},
        {"grad_tol",
         [&](const IniEntry& e, const std::string& k) {
           rc.grad_tol = parse_double(e, k);
           require(rc.grad_tol > 0, e, k, "must be positive");
         }},
        {"M",
         [&](const IniEntry& e, const std::string& k) {
           rc.M = parse_double(e, k);
           require(rc.M > 0, e, k, "must be positive");
         }},
        {"use_exact_refinement", [&](const IniEntry& e, const std::string& k) { rc.use_exact_refinement = parse_bool(e, k); }},
        {"mu_ceiling",
         [&](const IniEntry& e, const std::string& k) {
           rc.mu_ceiling = parse_double(e, k);
           require(rc.mu_ceiling > 0, e, k, "must be positive");
         }}}},
      {"scan",
       {{"k_min",
         [&](const IniEntry& e, const std::string& k) {
           rc.scan.k_min = parse_double(e, k);
           require(rc.scan.k_min > 0, e, k, "must be positive");
         }},
        {"k_max", [&](const IniEntry& e, const std::string& k) { rc.scan.k_max = parse_double(e, k); }},
        {"samples",
         [&](const IniEntry& e, const std::string& k) {
           rc.scan.samples = parse_int(e, k);
           require(rc.scan.samples >= 16, e, k, "must be at least 16");
         }},
        {"refine",
         [&](const IniEntry& e, const std::string& k) {
           if (e.value == "none") rc.refine = ScanRefine::none;
           else if (e.value == "double_minimum") rc.refine = ScanRefine::double_minimum;
           else if (e.value == "degenerate") rc.refine = ScanRefine::degenerate;
           else require(false, e, k, "must be none, double_minimum or degenerate");
         }},
        {"beta_lo", [&](const IniEntry& e, const std::string& k) { rc.beta_lo = parse_double(e, k); }},
        {"beta_hi", [&](const IniEntry& e, const std::string& k) { rc.beta_hi = parse_double(e, k); }}}},
      {"validate",
       {{"nx",
         [&](const IniEntry& e, const std::string& k) {
           rc.validate_nx = parse_int(e, k);
           require(rc.validate_nx >= 32 && (rc.validate_nx & (rc.validate_nx - 1)) == 0, e, k,
                   "must be a power of two, at least 32");
         }},
        {"samples",
         [&](const IniEntry& e, const std::string& k) {
           rc.validate_samples = parse_int(e, k);
           require(rc.validate_samples >= 1, e, k, "must be at least 1");
         }}}},
  };
  for (const auto& [sname, sec] : ini) {
    auto s = schema.find(sname);
    if (s == schema.end()) {
      int line = sec.empty() ? 0 : sec.begin()->second.line;
      throw ConfigError("unknown section [" + sname + "]" + (line ? " near line " + std::to_string(line) : ""), line);
    }
    for (const auto& [key, entry] : sec) {
      auto h = s->second.find(key);
      if (h == s->second.end())
        throw ConfigError("line " + std::to_string(entry.line) + ": unknown key " + key + " in [" + sname + "]",
                          entry.line);
      h->second(entry, key);
    }
  }
  // Cross-field invariants, reported at the later of the involved lines.
  auto line_of = [&](const std::string& s, const std::string& k) {
    auto a = ini.find(s);
    if (a == ini.end()) return 0;
    auto b = a->second.find(k);
    return b == a->second.end() ? 0 : b->second.line;
  };
  auto cross = [&](bool ok, const std::string& s, const std::string& k1, const std::string& k2,
                   const std::string& why) {
    if (ok) return;
    int line = std::max(line_of(s, k1), line_of(s, k2));
    throw ConfigError("line " + std::to_string(line) + ": " + why, line);
  };
  cross(rc.scan.k_max > rc.scan.k_min, "scan", "k_min", "k_max", "k_max must exceed k_min");
  cross(rc.beta_hi > rc.beta_lo && rc.beta_lo > 0, "scan", "beta_lo", "beta_hi", "need 0 < beta_lo < beta_hi");
  cross(rc.mu < rc.mu_ceiling, "minimize", "mu", "mu_ceiling", "mu must be below mu_ceiling");
  return rc;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

DnoOptions dno_options(const RunConfig& rc) {
  DnoOptions o;
  o.elements = rc.strip_ny / o.order;
  o.lower_depth = rc.depth_under;
  return o;
}

MinimizeConfig minimize_config(const RunConfig& rc, const CriticalPoint& crit) {
  MinimizeConfig m;
  m.mu = rc.mu;
  m.grid = PeriodicGrid::around_carrier(rc.n, crit.k0, rc.k0_multiples);
  m.max_iters = rc.max_iters;
  m.grad_tol = rc.grad_tol;
  m.admissibility_M = rc.M;
  m.use_exact_L_refinement = rc.use_exact_refinement;
  m.mu_ceiling = rc.mu_ceiling;
  m.dno = dno_options(rc);
  return m;
}

}  // namespace twolayer
