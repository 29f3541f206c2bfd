#pragma once

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dislokit/configuration.hpp"
#include "dislokit/continuum.hpp"
#include "dislokit/monodromy.hpp"
#include "dislokit/springs.hpp"
#include "dislokit/zeta.hpp"

namespace dislokit {

using json = nlohmann::ordered_json;

/// Shortest round-trip decimal form of a double; locale independent.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

enum class Command { Generate, Energy, Zeta, Scan, Monodromy };
enum class OutputFormat { Csv, Json };

// ---------------------------------------------------------------------------
// Strict config parsing. Unknown keys are rejected at every level.
// ---------------------------------------------------------------------------

namespace cfg {

inline void check_keys(const json& obj, const char* ctx,
                       std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(std::string(ctx) + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* k : allowed)
      if (key == k) {
        ok = true;
        break;
      }
    if (!ok)
      throw ConfigError("unknown key '" + key + "' in " + ctx);
  }
}

inline const json& require(const json& obj, const char* key, const char* ctx) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw ConfigError(std::string(ctx) + " requires key '" + key + "'");
  return *it;
}

inline double number(const json& v, const std::string& ctx) {
  if (!v.is_number()) throw ConfigError(ctx + " must be a number");
  return v.get<double>();
}

inline std::int64_t integer(const json& v, const std::string& ctx) {
  if (!v.is_number_integer()) throw ConfigError(ctx + " must be an integer");
  return v.get<std::int64_t>();
}

inline PlanePoint point(const json& v, const std::string& ctx) {
  if (!v.is_array() || v.size() != 2)
    throw ConfigError(ctx + " must be an [x, y] pair");
  return {number(v[0], ctx + "[0]"), number(v[1], ctx + "[1]")};
}

inline std::pair<double, double> interval(const json& v, const std::string& ctx) {
  if (!v.is_array() || v.size() != 2)
    throw ConfigError(ctx + " must be a [lo, hi] pair");
  return {number(v[0], ctx + "[0]"), number(v[1], ctx + "[1]")};
}

}  // namespace cfg

struct RegionSpec {
  double rho = 0.0;
  double n_outer = 0.0;
  std::optional<PlanePoint> center;  // nullopt = auto (first center)
};

struct GenerationSpec {
  IndexBox box;
  double window_lo = 0.0;
  double window_hi = 0.0;
};

struct ZetaSpec {
  PlanePoint z0;
  double rho = 0.0;
  std::vector<std::pair<double, double>> pairs;  // (s, n_outer)
};

struct ScanSpec {
  enum class Mode { Dipole, Single };
  Mode mode = Mode::Dipole;
  std::vector<double> n_values;
};

struct MonodromySpec {
  LatticeLoop loop;
};

struct OutputSpec {
  std::string path;  // empty = stdout
  std::optional<OutputFormat> format;
};

struct RunConfig {
  std::optional<LatticeSpec> lattice;
  std::optional<DislocationSet> dislocations;
  std::optional<RegionSpec> region;
  SpringConstants springs;
  std::optional<GenerationSpec> generation;
  std::optional<ZetaSpec> zeta;
  std::optional<ScanSpec> scan;
  std::optional<MonodromySpec> monodromy;
  OutputSpec output;
  int threads = 1;
};

inline LatticeSpec parse_lattice(const json& j) {
  cfg::check_keys(j, "lattice", {"kind", "a", "delta", "gamma_phase"});
  LatticeSpec spec;
  const auto& kind = cfg::require(j, "kind", "lattice");
  if (!kind.is_string()) throw ConfigError("lattice.kind must be a string");
  const std::string k = kind.get<std::string>();
  if (k == "SC")
    spec.kind = LatticeKind::SC;
  else if (k == "BCC")
    spec.kind = LatticeKind::BCC;
  else
    throw ConfigError("lattice.kind must be 'SC' or 'BCC'");
  spec.a = cfg::number(cfg::require(j, "a", "lattice"), "lattice.a");
  if (auto it = j.find("delta"); it != j.end()) {
    if (!it->is_array() || it->size() != 3)
      throw ConfigError("lattice.delta must be [d1, d2, d3]");
    for (int i = 0; i < 3; ++i)
      spec.delta[static_cast<std::size_t>(i)] =
          cfg::number((*it)[static_cast<std::size_t>(i)], "lattice.delta");
  }
  if (auto it = j.find("gamma_phase"); it != j.end())
    spec.gamma_phase = cfg::number(*it, "lattice.gamma_phase");
  validate(spec);
  return spec;
}

inline DislocationSet parse_dislocations(const json& j) {
  cfg::check_keys(j, "dislocations", {"plus", "minus"});
  DislocationSet dis;
  auto read = [&](const char* key, std::vector<PlanePoint>& out) {
    auto it = j.find(key);
    if (it == j.end()) return;
    if (!it->is_array())
      throw ConfigError(std::string("dislocations.") + key + " must be an array");
    for (const auto& p : *it)
      out.push_back(cfg::point(p, std::string("dislocations.") + key));
  };
  read("plus", dis.plus);
  read("minus", dis.minus);
  validate(dis);
  return dis;
}

inline RegionSpec parse_region(const json& j) {
  cfg::check_keys(j, "region", {"rho", "n_outer", "center"});
  RegionSpec r;
  r.rho = cfg::number(cfg::require(j, "rho", "region"), "region.rho");
  r.n_outer = cfg::number(cfg::require(j, "n_outer", "region"), "region.n_outer");
  if (auto it = j.find("center"); it != j.end()) {
    if (it->is_string()) {
      if (it->get<std::string>() != "auto")
        throw ConfigError("region.center must be [x, y] or \"auto\"");
    } else {
      r.center = cfg::point(*it, "region.center");
    }
  }
  if (!(r.rho > 0.0) || !(r.n_outer > r.rho))
    throw ConfigError("region requires 0 < rho < n_outer");
  return r;
}

inline SpringConstants parse_springs(const json& j) {
  cfg::check_keys(j, "springs", {"k_p", "k_d"});
  SpringConstants k;
  if (auto it = j.find("k_p"); it != j.end())
    k.k_p = cfg::number(*it, "springs.k_p");
  if (auto it = j.find("k_d"); it != j.end())
    k.k_d = cfg::number(*it, "springs.k_d");
  validate(k);
  return k;
}

inline GenerationSpec parse_generation(const json& j) {
  cfg::check_keys(j, "generation", {"l1_range", "l2_range", "height_window"});
  GenerationSpec g;
  auto int_range = [&](const char* key, std::int64_t& lo, std::int64_t& hi) {
    const auto& r = cfg::require(j, key, "generation");
    if (!r.is_array() || r.size() != 2)
      throw ConfigError(std::string("generation.") + key +
                        " must be an integer [lo, hi] pair");
    lo = cfg::integer(r[0], std::string("generation.") + key + "[0]");
    hi = cfg::integer(r[1], std::string("generation.") + key + "[1]");
  };
  int_range("l1_range", g.box.l1_min, g.box.l1_max);
  int_range("l2_range", g.box.l2_min, g.box.l2_max);
  const auto w = cfg::interval(cfg::require(j, "height_window", "generation"),
                               "generation.height_window");
  g.window_lo = w.first;
  g.window_hi = w.second;
  if (!(g.window_lo <= g.window_hi))
    throw ConfigError("generation.height_window must satisfy lo <= hi");
  validate(g.box);
  return g;
}

inline ZetaSpec parse_zeta(const json& j) {
  cfg::check_keys(j, "zeta", {"z0", "rho", "pairs"});
  ZetaSpec z;
  z.z0 = cfg::point(cfg::require(j, "z0", "zeta"), "zeta.z0");
  z.rho = cfg::number(cfg::require(j, "rho", "zeta"), "zeta.rho");
  const auto& pairs = cfg::require(j, "pairs", "zeta");
  if (!pairs.is_array() || pairs.empty())
    throw ConfigError("zeta.pairs must be a nonempty array of [s, N] pairs");
  for (const auto& p : pairs) {
    if (!p.is_array() || p.size() != 2)
      throw ConfigError("zeta.pairs entries must be [s, N] pairs");
    z.pairs.emplace_back(cfg::number(p[0], "zeta.pairs s"),
                         cfg::number(p[1], "zeta.pairs N"));
  }
  return z;
}

inline ScanSpec parse_scan(const json& j) {
  cfg::check_keys(j, "scan", {"mode", "n_values"});
  ScanSpec s;
  const auto& mode = cfg::require(j, "mode", "scan");
  if (!mode.is_string()) throw ConfigError("scan.mode must be a string");
  const std::string m = mode.get<std::string>();
  if (m == "dipole")
    s.mode = ScanSpec::Mode::Dipole;
  else if (m == "single")
    s.mode = ScanSpec::Mode::Single;
  else
    throw ConfigError("scan.mode must be 'dipole' or 'single'");
  const auto& nv = cfg::require(j, "n_values", "scan");
  if (!nv.is_array() || nv.size() < 2)
    throw ConfigError("scan.n_values must list at least two N values");
  for (const auto& n : nv) s.n_values.push_back(cfg::number(n, "scan.n_values"));
  for (std::size_t i = 0; i + 1 < s.n_values.size(); ++i)
    if (!(s.n_values[i] < s.n_values[i + 1]))
      throw ConfigError("scan.n_values must be strictly increasing");
  return s;
}

inline MonodromySpec parse_monodromy(const json& j) {
  cfg::check_keys(j, "monodromy", {"loop", "rectangle", "sheet"});
  MonodromySpec m;
  const bool has_loop = j.contains("loop");
  const bool has_rect = j.contains("rectangle");
  if (has_loop == has_rect)
    throw ConfigError("monodromy requires exactly one of 'loop' or 'rectangle'");
  if (has_loop) {
    const auto& steps = j["loop"];
    if (!steps.is_array())
      throw ConfigError("monodromy.loop must be an array of [sheet, l1, l2]");
    for (const auto& s : steps) {
      if (!s.is_array() || s.size() != 3)
        throw ConfigError("monodromy.loop entries must be [sheet, l1, l2]");
      ColumnIndex c;
      c.sheet = static_cast<int>(cfg::integer(s[0], "monodromy.loop sheet"));
      c.l1 = cfg::integer(s[1], "monodromy.loop l1");
      c.l2 = cfg::integer(s[2], "monodromy.loop l2");
      check_sheet(c.sheet);
      m.loop.steps.push_back(c);
    }
  } else {
    const auto& r = j["rectangle"];
    if (!r.is_array() || r.size() != 4)
      throw ConfigError("monodromy.rectangle must be [l1_min, l1_max, l2_min, l2_max]");
    int sheet = 0;
    if (auto it = j.find("sheet"); it != j.end())
      sheet = static_cast<int>(cfg::integer(*it, "monodromy.sheet"));
    check_sheet(sheet);
    m.loop = rectangle_loop(cfg::integer(r[0], "monodromy.rectangle"),
                            cfg::integer(r[1], "monodromy.rectangle"),
                            cfg::integer(r[2], "monodromy.rectangle"),
                            cfg::integer(r[3], "monodromy.rectangle"), sheet);
  }
  validate(m.loop);
  return m;
}

inline OutputSpec parse_output(const json& j) {
  cfg::check_keys(j, "output", {"path", "format"});
  OutputSpec o;
  if (auto it = j.find("path"); it != j.end()) {
    if (!it->is_string()) throw ConfigError("output.path must be a string");
    o.path = it->get<std::string>();
  }
  if (auto it = j.find("format"); it != j.end()) {
    if (!it->is_string()) throw ConfigError("output.format must be a string");
    const std::string f = it->get<std::string>();
    if (f == "csv")
      o.format = OutputFormat::Csv;
    else if (f == "json")
      o.format = OutputFormat::Json;
    else
      throw ConfigError("output.format must be 'csv' or 'json'");
  }
  return o;
}

inline RunConfig parse_config(const json& j) {
  cfg::check_keys(j, "config",
                  {"lattice", "dislocations", "region", "springs", "generation",
                   "zeta", "scan", "monodromy", "output"});
  RunConfig c;
  if (auto it = j.find("lattice"); it != j.end()) c.lattice = parse_lattice(*it);
  if (auto it = j.find("dislocations"); it != j.end())
    c.dislocations = parse_dislocations(*it);
  if (auto it = j.find("region"); it != j.end()) c.region = parse_region(*it);
  if (auto it = j.find("springs"); it != j.end()) c.springs = parse_springs(*it);
  if (auto it = j.find("generation"); it != j.end())
    c.generation = parse_generation(*it);
  if (auto it = j.find("zeta"); it != j.end()) c.zeta = parse_zeta(*it);
  if (auto it = j.find("scan"); it != j.end()) c.scan = parse_scan(*it);
  if (auto it = j.find("monodromy"); it != j.end())
    c.monodromy = parse_monodromy(*it);
  if (auto it = j.find("output"); it != j.end()) c.output = parse_output(*it);
  return c;
}

inline RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  return parse_config(j);
}

// ---------------------------------------------------------------------------
// Commands. Each returns the full output file content.
// ---------------------------------------------------------------------------

namespace detail {

template <class T>
const T& demand(const std::optional<T>& opt, const char* what) {
  if (!opt) throw ConfigError(std::string("this command requires a '") + what +
                              "' config section");
  return *opt;
}

inline PlanePoint auto_center(const RegionSpec& region,
                              const DislocationSet& dis) {
  if (region.center) return *region.center;
  if (!dis.plus.empty()) return dis.plus.front();
  if (!dis.minus.empty()) return dis.minus.front();
  throw ConfigError("region.center is 'auto' but the dislocation set is empty");
}

inline void warn_boundary(const AnnulusRegion& region) {
  if (annulus_boundary_is_close(region))
    std::cerr << "warning: a lattice point lies within 1e-9*a of an annulus "
                 "boundary circle; strict membership is rounding-sensitive\n";
}

inline json point_json(PlanePoint p) { return json::array({p.x, p.y}); }

inline json dislocations_json(const DislocationSet& dis) {
  json plus = json::array();
  json minus = json::array();
  for (const auto& p : dis.plus) plus.push_back(point_json(p));
  for (const auto& m : dis.minus) minus.push_back(point_json(m));
  return json{{"plus", plus}, {"minus", minus}};
}

}  // namespace detail

inline OutputFormat resolve_format(const RunConfig& c, OutputFormat fallback) {
  return c.output.format.value_or(fallback);
}

inline std::string cmd_generate(const RunConfig& c) {
  const auto& spec = detail::demand(c.lattice, "lattice");
  const auto& dis = detail::demand(c.dislocations, "dislocations");
  const auto& gen = detail::demand(c.generation, "generation");
  const Configuration cfg = generate_configuration(
      spec, dis, gen.box, gen.window_lo, gen.window_hi);

  if (resolve_format(c, OutputFormat::Csv) == OutputFormat::Csv) {
    std::string out = "sheet,l1,l2,x,y,z\n";
    for (const auto& p : cfg.points)
      for (double h : p.heights) {
        out += std::to_string(p.column.sheet);
        out += ',';
        out += std::to_string(p.column.l1);
        out += ',';
        out += std::to_string(p.column.l2);
        out += ',';
        out += format_double(p.planar.x);
        out += ',';
        out += format_double(p.planar.y);
        out += ',';
        out += format_double(h);
        out += '\n';
      }
    return out;
  }
  json rows = json::array();
  for (const auto& p : cfg.points)
    for (double h : p.heights)
      rows.push_back(json{{"sheet", p.column.sheet},
                          {"l1", p.column.l1},
                          {"l2", p.column.l2},
                          {"x", p.planar.x},
                          {"y", p.planar.y},
                          {"z", h}});
  return rows.dump(2) + "\n";
}

inline std::string cmd_energy(const RunConfig& c) {
  const auto& spec = detail::demand(c.lattice, "lattice");
  if (spec.kind != LatticeKind::SC)
    throw UnsupportedLattice("energy is defined for the SC lattice only");
  const auto& dis = detail::demand(c.dislocations, "dislocations");
  const auto& region = detail::demand(c.region, "region");
  const SpringConstants k = c.springs;

  json report;
  std::size_t region_size = 0;
  double exact = 0.0;
  std::optional<double> zeta_approx;
  std::optional<double> continuum;
  std::optional<PlanePoint> center;

  if (!dis.empty()) {
    center = detail::auto_center(region, dis);
    const bool dipole = detail::is_mirror_dipole(dis);
    std::vector<Cell> members;
    if (dipole) {
      if (!(region.rho * spec.a > 2.0 * std::abs(dis.plus[0].y)))
        throw HypothesisViolated(
            "dipole energy requires rho*a > 2|y0|");
      members = dipole_region_members(dis.plus[0], dis.minus[0], region.rho,
                                      region.n_outer, spec.a);
      detail::warn_boundary({dis.plus[0], region.rho, region.n_outer, spec.a});
      detail::warn_boundary({dis.minus[0], region.rho, region.n_outer, spec.a});
      zeta_approx =
          leading_order_energy(dis, members, spec.a, k.k_d, c.threads);
      continuum = continuum_dipole_energy(dis.plus[0].x, dis.plus[0].y,
                                          region.rho, region.n_outer, spec.a,
                                          energy_prefactor(spec.a, k.k_d));
    } else {
      const AnnulusRegion ann{*center, region.rho, region.n_outer, spec.a};
      members = annulus_members(ann);
      detail::warn_boundary(ann);
      if (dis.size() == 1) {
        zeta_approx = zeta_energy_approx(*center, spec.a, k.k_d, region.rho,
                                         region.n_outer, c.threads);
        continuum = continuum_annulus_energy(spec.a, k.k_d / spec.a,
                                             region.rho, region.n_outer);
      }
    }
    region_size = members.size();
    exact = exact_energy(dis, members, spec.a, k, spec.gamma_phase, c.threads);
  }

  report["exact"] = exact;
  report["exact_per_length"] = exact / spec.a;  // comparable with continuum
  if (zeta_approx) report["zeta_approx"] = *zeta_approx;
  if (continuum) report["continuum"] = *continuum;
  if (zeta_approx && exact > 0.0)
    report["relative_gap"] = std::abs(exact - *zeta_approx) / exact;
  report["region_size"] = region_size;
  json params{{"a", spec.a},
              {"k_p", k.k_p},
              {"k_d", k.k_d},
              {"rho", region.rho},
              {"n_outer", region.n_outer},
              {"gamma_phase", spec.gamma_phase},
              {"dislocations", detail::dislocations_json(dis)}};
  if (center) params["center"] = detail::point_json(*center);
  report["params"] = params;
  return report.dump(2) + "\n";
}

inline std::string cmd_zeta(const RunConfig& c) {
  const auto& z = detail::demand(c.zeta, "zeta");
  struct Row {
    double s, rho, n, value;
    std::size_t count;
  };
  std::vector<Row> rows;
  for (const auto& [s, n] : z.pairs) {
    const ZetaParams p{s, z.z0, z.rho, n};
    validate(p);
    const auto members = annulus_members({{-z.z0.x, -z.z0.y}, z.rho, n, 1.0});
    detail::warn_boundary({{-z.z0.x, -z.z0.y}, z.rho, n, 1.0});
    rows.push_back({s, z.rho, n, truncated_zeta(p, c.threads), members.size()});
  }
  if (resolve_format(c, OutputFormat::Csv) == OutputFormat::Csv) {
    std::string out = "s,rho,n_outer,value,member_count\n";
    for (const auto& r : rows) {
      out += format_double(r.s);
      out += ',';
      out += format_double(r.rho);
      out += ',';
      out += format_double(r.n);
      out += ',';
      out += format_double(r.value);
      out += ',';
      out += std::to_string(r.count);
      out += '\n';
    }
    return out;
  }
  json arr = json::array();
  for (const auto& r : rows)
    arr.push_back(json{{"s", r.s},
                       {"rho", r.rho},
                       {"n_outer", r.n},
                       {"value", r.value},
                       {"member_count", r.count}});
  return arr.dump(2) + "\n";
}

inline std::string cmd_scan(const RunConfig& c) {
  const auto& scan = detail::demand(c.scan, "scan");
  const auto& spec = detail::demand(c.lattice, "lattice");
  const auto& dis = detail::demand(c.dislocations, "dislocations");
  const auto& region = detail::demand(c.region, "region");
  const double k_d = c.springs.k_d;

  std::vector<ScanRow> rows;
  std::optional<LogFit> fit;
  const double n_max = scan.n_values.back();
  if (scan.mode == ScanSpec::Mode::Dipole) {
    if (!detail::is_mirror_dipole(dis))
      throw ConfigError(
          "dipole scan requires dislocations {(x0, y0)} and {(x0, -y0)}");
    detail::warn_boundary({dis.plus[0], region.rho, n_max, spec.a});
    detail::warn_boundary({dis.minus[0], region.rho, n_max, spec.a});
    rows = dipole_convergence_scan(dis.plus[0].x, dis.plus[0].y, region.rho,
                                   spec.a, k_d, scan.n_values, c.threads);
  } else {
    if (dis.size() != 1)
      throw ConfigError("single scan requires exactly one dislocation center");
    const PlanePoint center = detail::auto_center(region, dis);
    detail::warn_boundary(
        {{center.x / spec.a, center.y / spec.a}, region.rho, n_max, 1.0});
    std::vector<std::pair<double, double>> pts;
    for (double n : scan.n_values) {
      if (!(n > region.rho)) throw ConfigError("scan requires every N > rho");
      const auto members =
          annulus_members({{center.x / spec.a, center.y / spec.a}, region.rho,
                           n, 1.0});
      rows.push_back({n,
                      zeta_energy_approx(center, spec.a, k_d, region.rho, n,
                                         c.threads),
                      members.size()});
      pts.emplace_back(std::log(n), rows.back().energy);
    }
    fit = fit_line(pts);
  }

  if (resolve_format(c, OutputFormat::Csv) == OutputFormat::Csv) {
    std::string out = "n_outer,energy,delta,ratio,region_size\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      out += format_double(rows[i].n_outer);
      out += ',';
      out += format_double(rows[i].energy);
      out += ',';
      if (i >= 1) out += format_double(rows[i].energy - rows[i - 1].energy);
      out += ',';
      if (i >= 2) {
        const double d1 = rows[i].energy - rows[i - 1].energy;
        const double d0 = rows[i - 1].energy - rows[i - 2].energy;
        if (d0 != 0.0) out += format_double(d1 / d0);
      }
      out += ',';
      out += std::to_string(rows[i].region_size);
      out += '\n';
    }
    if (fit)
      out += "# slope=" + format_double(fit->slope) +
             " residual=" + format_double(fit->residual) + "\n";
    return out;
  }
  json arr = json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    json row{{"n_outer", rows[i].n_outer},
             {"energy", rows[i].energy},
             {"region_size", rows[i].region_size}};
    if (i >= 1) row["delta"] = rows[i].energy - rows[i - 1].energy;
    if (i >= 2) {
      const double d1 = rows[i].energy - rows[i - 1].energy;
      const double d0 = rows[i - 1].energy - rows[i - 2].energy;
      if (d0 != 0.0) row["ratio"] = d1 / d0;
    }
    arr.push_back(row);
  }
  json out{{"rows", arr}};
  if (fit) {
    out["slope"] = fit->slope;
    out["residual"] = fit->residual;
  }
  return out.dump(2) + "\n";
}

inline std::string cmd_monodromy(const RunConfig& c) {
  const auto& spec = detail::demand(c.lattice, "lattice");
  const auto& dis = detail::demand(c.dislocations, "dislocations");
  const auto& mono = detail::demand(c.monodromy, "monodromy");

  const double d = spec.fiber_period();
  const PlanarMap map = spec.kind == LatticeKind::SC ? sc_planar_map(spec)
                                                     : bcc_planar_map(spec);
  const double gain = loop_monodromy(mono.loop, dis, d, map, spec.gamma_phase,
                                     kCenterTol * spec.a);
  const double turns = gain / d;
  const double winding = std::round(turns);
  const double dist = std::abs(turns - winding);

  if (resolve_format(c, OutputFormat::Json) == OutputFormat::Csv) {
    std::string out = "gain,fiber_period,winding,distance_to_integer\n";
    out += format_double(gain);
    out += ',';
    out += format_double(d);
    out += ',';
    out += format_double(winding);
    out += ',';
    out += format_double(dist);
    out += '\n';
    return out;
  }
  json report{{"gain", gain},
              {"fiber_period", d},
              {"winding", static_cast<std::int64_t>(winding)},
              {"distance_to_integer", dist},
              {"steps", mono.loop.steps.size() - 1}};
  return report.dump(2) + "\n";
}

inline std::string run_command(Command cmd, const RunConfig& c) {
  switch (cmd) {
    case Command::Generate:
      return cmd_generate(c);
    case Command::Energy:
      return cmd_energy(c);
    case Command::Zeta:
      return cmd_zeta(c);
    case Command::Scan:
      return cmd_scan(c);
    case Command::Monodromy:
      return cmd_monodromy(c);
  }
  throw ConfigError("unknown command");
}

// ---------------------------------------------------------------------------
// Command-line front end.
// ---------------------------------------------------------------------------

/// Stable exit codes: 0 ok, 2 config, 3 center-hit, 4 unsupported-lattice,
/// 5 hypothesis-violated, 6 loop-too-coarse.
inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (dynamic_cast<const DislocationCenterHit*>(&e)) return 3;
  if (dynamic_cast<const UnsupportedLattice*>(&e)) return 4;
  if (dynamic_cast<const HypothesisViolated*>(&e)) return 5;
  if (dynamic_cast<const StepTooCoarse*>(&e)) return 6;
  return 1;
}

inline const char* kUsage =
    "usage: dislokit <generate|energy|zeta|scan|monodromy> --config <path>\n"
    "                [--output <path>] [--format csv|json] [--threads k]\n";

inline int run_cli(int argc, const char* const* argv) {
  try {
    if (argc < 2) throw ConfigError("missing command");
    const std::string cmd_name = argv[1];
    Command cmd;
    if (cmd_name == "generate")
      cmd = Command::Generate;
    else if (cmd_name == "energy")
      cmd = Command::Energy;
    else if (cmd_name == "zeta")
      cmd = Command::Zeta;
    else if (cmd_name == "scan")
      cmd = Command::Scan;
    else if (cmd_name == "monodromy")
      cmd = Command::Monodromy;
    else
      throw ConfigError("unknown command: " + cmd_name);

    std::string config_path;
    std::string output_path;
    std::optional<OutputFormat> format;
    std::optional<int> threads;
    for (int i = 2; i < argc; ++i) {
      const std::string arg = argv[i];
      auto next = [&]() -> std::string {
        if (i + 1 >= argc) throw ConfigError("flag " + arg + " needs a value");
        return argv[++i];
      };
      if (arg == "--config")
        config_path = next();
      else if (arg == "--output")
        output_path = next();
      else if (arg == "--format") {
        const std::string f = next();
        if (f == "csv")
          format = OutputFormat::Csv;
        else if (f == "json")
          format = OutputFormat::Json;
        else
          throw ConfigError("--format must be csv or json");
      } else if (arg == "--threads") {
        const std::string t = next();
        int v = 0;
        const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
        if (res.ec != std::errc{} || res.ptr != t.data() + t.size() || v < 1)
          throw ConfigError("--threads must be a positive integer");
        threads = v;
      } else {
        throw ConfigError("unknown flag: " + arg);
      }
    }
    if (config_path.empty()) throw ConfigError("--config is required");

    RunConfig config = load_config_file(config_path);
    if (threads) {
      config.threads = *threads;
    } else if (const char* env = std::getenv("DISLOKIT_THREADS")) {
      int v = 0;
      const std::string t = env;
      const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
      if (res.ec != std::errc{} || res.ptr != t.data() + t.size() || v < 1)
        throw ConfigError("DISLOKIT_THREADS must be a positive integer");
      config.threads = v;
    }
    if (!output_path.empty()) config.output.path = output_path;
    if (format) config.output.format = format;

    const std::string content = run_command(cmd, config);
    if (config.output.path.empty() || config.output.path == "-") {
      std::cout << content;
    } else {
      std::ofstream out(config.output.path, std::ios::binary);
      if (!out)
        throw ConfigError("cannot open output file: " + config.output.path);
      out << content;
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "dislokit: error: " << e.what() << "\n";
    if (exit_code_for(e) == 2) std::cerr << kUsage;
    return exit_code_for(e);
  }
}

}  // namespace dislokit
