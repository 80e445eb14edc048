#include "twolayer/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "twolayer/errors.hpp"

namespace twolayer {

std::string format_number(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void dump(const Json& j, std::string& out, int depth) {
  const std::string pad(2 * (depth + 1), ' '), close(2 * depth, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(it.key()).dump() + ": ";
        dump(it.value(), out, depth + 1);
      }
      out += "\n" + close + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[";
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ", ";
        first = false;
        dump(v, out, depth + 1);
      }
      out += "]";
      return;
    }
    case Json::value_t::number_float:
      out += format_number(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_json(const Json& j) {
  std::string out;
  dump(j, out, 0);
  out += "\n";
  return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f << content;
    if (!f.flush()) throw std::runtime_error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string table_csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& columns) {
  std::string out;
  for (size_t c = 0; c < header.size(); ++c) out += (c ? "," : "") + header[c];
  out += "\n";
  const size_t rows = columns.empty() ? 0 : columns.front().size();
  for (size_t r = 0; r < rows; ++r) {
    for (size_t c = 0; c < columns.size(); ++c) {
      if (c) out += ",";
      out += format_number(columns[c][r]);
    }
    out += "\n";
  }
  return out;
}

std::string profile_csv(const ProfilePair& eta) {
  std::vector<double> x(eta.grid.n);
  for (int i = 0; i < eta.grid.n; ++i) x[i] = eta.grid.x(i);
  return table_csv({"x", "eta_under", "eta_over"}, {x, eta.under, eta.over});
}

Json profile_sidecar(const PeriodicGrid& g) {
  return Json{{"n", g.n}, {"period", g.period}, {"k0_multiple", g.k0_multiple}};
}

ProfilePair read_profile(const std::filesystem::path& csv, const std::filesystem::path& sidecar) {
  std::ifstream js(sidecar);
  if (!js) throw ConfigError("cannot open " + sidecar.string());
  Json meta;
  try {
    meta = Json::parse(js);
  } catch (const std::exception& e) {
    throw ConfigError(sidecar.string() + ": " + e.what());
  }
  PeriodicGrid g(meta.at("n").get<int>(), meta.at("period").get<double>(), meta.value("k0_multiple", 0));
  ProfilePair eta = ProfilePair::zero(g);
  std::ifstream f(csv);
  if (!f) throw ConfigError("cannot open " + csv.string());
  std::string line;
  int lineno = 1;
  if (!std::getline(f, line) || line != "x,eta_under,eta_over")
    throw ConfigError(csv.string() + ": missing header x,eta_under,eta_over", lineno);
  int i = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (i >= g.n) throw ConfigError(csv.string() + ": more rows than n", lineno);
    double x, u, o;
    char c1, c2;
    std::istringstream ss(line);
    if (!(ss >> x >> c1 >> u >> c2 >> o) || c1 != ',' || c2 != ',')
      throw ConfigError(csv.string() + ": malformed row", lineno);
    eta.under[i] = u;
    eta.over[i] = o;
    ++i;
  }
  if (i != g.n) throw ConfigError(csv.string() + ": expected " + std::to_string(g.n) + " rows", lineno);
  return eta;
}

Json to_json(const Params& p) {
  return Json{{"rho", p.rho}, {"beta_under", p.beta_under}, {"beta_over", p.beta_over}};
}

Json to_json(const AssumptionReport& r) {
  Json comp = Json::array();
  for (const auto& m : r.competing_minima) comp.push_back(Json{{"k", m.k}, {"lambda", m.lambda}});
  return Json{{"verdict", to_string(r.verdict)},
              {"k0", r.crit.k0},
              {"nu0", r.crit.nu0},
              {"a", r.crit.a},
              {"lambda2", r.crit.lambda2},
              {"A2", r.crit.a2},
              {"global_minimum", r.crit.assumption1_global},
              {"non_degenerate", r.crit.assumption1_nondeg},
              {"competing_minima", comp}};
}

Json to_json(const NlsCoefficients& c) {
  return Json{{"A2", c.a2},       {"A3", c.a3},         {"A4", c.a4},     {"A4_1", c.a4_1},
              {"A4_2", c.a4_2},   {"alpha", c.alpha},   {"nu_nls", c.nu_nls}, {"i_nls", c.i_nls},
              {"focusing", c.focusing}};
}

Json to_json(const FunctionalBreakdown& b) {
  return Json{{"K", b.k_total}, {"K2", b.k2}, {"K4", b.k4}, {"L2", b.l2}, {"L3", b.l3},
              {"L4", b.l4},     {"L", b.l_trunc}, {"J", b.j_mu}, {"mu", b.mu}};
}

}  // namespace twolayer
