#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "rabi/errors.hpp"
#include "rabi/model.hpp"
#include "rabi/observables.hpp"
#include "rabi/oracle.hpp"
#include "rabi/parallel.hpp"
#include "rabi/spectrum.hpp"

using json = nlohmann::ordered_json;
using namespace rabi;

namespace {

enum class Kind { Real, Int, Text, IntList };

struct Key {
  const char* name;
  Kind kind;
  const char* help;
};

// Every configurable key, in the order used for the resolved-config header.
const std::vector<Key> kKeys = {
    {"model", Kind::Text, "two-photon or two-mode"},
    {"omega", Kind::Real, "boson frequency"},
    {"delta", Kind::Real, "qubit splitting"},
    {"g", Kind::Real, "coupling"},
    {"lambda", Kind::Real, "anisotropy (weight of counter-rotating terms)"},
    {"sector", Kind::Text, "even or odd Fock subspace (two-photon)"},
    {"n0", Kind::Int, "ladder index (two-mode)"},
    {"gmin", Kind::Real, "coupling sweep start"},
    {"gmax", Kind::Real, "coupling sweep end"},
    {"gsteps", Kind::Int, "coupling sweep points"},
    {"emin", Kind::Real, "energy window start"},
    {"emax", Kind::Real, "energy window end"},
    {"steps", Kind::Int, "energy grid points"},
    {"levels", Kind::Int, "levels per branch / entropy levels / oracle levels"},
    {"ntrunc", Kind::Int, "oracle cutoff (0 = stability-gated automatic)"},
    {"k", Kind::Int, "pole count for the condensation table"},
    {"gsuper", Kind::Real, "supercritical coupling for the critical command"},
    {"ntrunc_list", Kind::IntList, "cutoffs for the supercritical fit"},
    {"format", Kind::Text, "csv or json"},
};

json defaults() {
  json j;
  j["model"] = "two-photon";
  j["omega"] = 1.0;
  j["delta"] = 0.0;
  j["g"] = 0.0;
  j["lambda"] = 1.0;
  j["sector"] = "even";
  j["n0"] = 0;
  j["gmin"] = 0.0;
  j["gmax"] = 0.5;
  j["gsteps"] = 51;
  j["steps"] = 1000;
  j["ntrunc"] = 0;
  j["k"] = 5;
  j["ntrunc_list"] = json::array({200, 400, 600, 800, 1000});
  j["format"] = "csv";
  return j;
}

json preset(const std::string& name) {
  const json tp = {{"model", "two-photon"}, {"omega", 1.0}, {"delta", 0.2}, {"lambda", 0.25}};
  const json tm = {{"model", "two-mode"}, {"omega", 1.0}, {"delta", 0.2}, {"lambda", 0.5}};
  json j;
  if (name == "fig1") {
    j = tp;
    j.update({{"g", 0.3}, {"sector", "even"}, {"emin", -0.5}, {"emax", 4.0}, {"steps", 2000}});
  } else if (name == "fig2" || name == "fig3") {
    j = tp;
    j.update({{"sector", "even"}, {"gmin", 0.0}, {"gmax", 0.79}, {"gsteps", 80},
              {"levels", name == "fig2" ? 3 : 2}});
  } else if (name == "fig4") {
    j = tp;
    j.update({{"g", 0.85}, {"ntrunc", 200}, {"levels", 12}, {"gmin", 0.4}, {"gmax", 0.792},
              {"gsteps", 9}, {"k", 5}, {"gsuper", 0.85}});
  } else if (name == "fig5") {
    j = tm;
    j.update({{"g", 0.5}, {"n0", 0}, {"emin", -1.0}, {"emax", 4.0}, {"steps", 2000}});
  } else if (name == "fig6" || name == "fig7") {
    j = tm;
    j.update({{"n0", 0}, {"gmin", 0.0}, {"gmax", 1.2}, {"gsteps", 61},
              {"levels", name == "fig6" ? 3 : 2}});
  } else {
    throw ConfigError("preset: unknown preset '" + name + "' (expected fig1 ... fig7)");
  }
  return j;
}

const Key& find_key(const std::string& name) {
  for (const Key& k : kKeys)
    if (name == k.name) return k;
  throw ConfigError("config: unknown key '" + name + "'");
}

json parse_flag(const Key& k, const std::string& text) {
  try {
    std::size_t used = 0;
    switch (k.kind) {
      case Kind::Real: {
        const double v = std::stod(text, &used);
        if (used != text.size()) break;
        return v;
      }
      case Kind::Int: {
        const long v = std::stol(text, &used);
        if (used != text.size()) break;
        return v;
      }
      case Kind::Text:
        return text;
      case Kind::IntList: {
        json arr = json::array();
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) {
          const long v = std::stol(item, &used);
          if (used != item.size()) throw std::invalid_argument(item);
          arr.push_back(v);
        }
        return arr;
      }
    }
  } catch (const std::exception&) {
  }
  throw ConfigError(std::string(k.name) + ": cannot parse '" + text + "'");
}

struct RunConfig {
  std::string command;
  ModelParams params;
  double gmin = 0, gmax = 0;
  int gsteps = 0;
  bool hasWindow = false;
  double emin = 0, emax = 0;
  int steps = 0;
  int levels = 0;
  int ntrunc = 0;
  int k = 0;
  bool hasSuper = false;
  double gsuper = 0;
  std::vector<int> ntruncList;
  std::string format;
  json resolved;
};

double real_key(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_number()) throw ConfigError(std::string(key) + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(std::string(key) + ": must be finite");
  return x;
}

long int_key(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError(std::string(key) + ": expected an integer");
  return v.get<long>();
}

std::string text_key(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_string()) throw ConfigError(std::string(key) + ": expected a string");
  return v.get<std::string>();
}

void require(bool ok, const char* key, const std::string& what) {
  if (!ok) throw ConfigError(std::string(key) + ": " + what);
}

RunConfig resolve(const std::string& command, const json& j) {
  for (auto it = j.begin(); it != j.end(); ++it) find_key(it.key());
  RunConfig c;
  c.command = command;
  const std::string model = text_key(j, "model");
  require(model == "two-photon" || model == "two-mode", "model",
          "expected two-photon or two-mode, got '" + model + "'");
  c.params.kind = model == "two-photon" ? ModelKind::TwoPhoton : ModelKind::TwoMode;
  c.params.omega = real_key(j, "omega");
  require(c.params.omega > 0, "omega", "must be positive");
  c.params.delta = real_key(j, "delta");
  c.params.g = real_key(j, "g");
  c.params.lambda = real_key(j, "lambda");
  require(c.params.lambda >= 0, "lambda", "must be non-negative");
  const std::string sector = text_key(j, "sector");
  require(sector == "even" || sector == "odd", "sector", "expected even or odd");
  c.params.sector.fockParity = sector == "even" ? FockParity::Even : FockParity::Odd;
  const long n0 = int_key(j, "n0");
  require(n0 >= 0 && n0 < 100000, "n0", "must be a non-negative integer");
  c.params.sector.n0 = static_cast<int>(n0);

  c.gmin = real_key(j, "gmin");
  c.gmax = real_key(j, "gmax");
  require(c.gmax >= c.gmin, "gmax", "must not be below gmin");
  const long gsteps = int_key(j, "gsteps");
  require(gsteps >= 1 && gsteps <= 100000, "gsteps", "must be in [1, 100000]");
  c.gsteps = static_cast<int>(gsteps);
  require(gsteps > 1 || c.gmin == c.gmax, "gsteps", "a single point needs gmin == gmax");

  c.hasWindow = j.contains("emin") || j.contains("emax");
  if (c.hasWindow) {
    require(j.contains("emin"), "emin", "required together with emax");
    require(j.contains("emax"), "emax", "required together with emin");
    c.emin = real_key(j, "emin");
    c.emax = real_key(j, "emax");
    require(c.emax > c.emin, "emax", "must exceed emin");
  }
  const long steps = int_key(j, "steps");
  require(steps >= 2 && steps <= 10000000, "steps", "must be in [2, 1e7]");
  c.steps = static_cast<int>(steps);
  // per-command default when unset
  const long levels = j.contains("levels") ? int_key(j, "levels")
                      : command == "entropy"  ? 1
                      : command == "oracle"   ? 12
                                              : 3;
  require(levels >= 1 && levels <= 1000, "levels", "must be in [1, 1000]");
  c.levels = static_cast<int>(levels);
  const long ntrunc = int_key(j, "ntrunc");
  require(ntrunc == 0 || (ntrunc >= 4 && ntrunc <= 3000), "ntrunc",
          "must be 0 (automatic) or in [4, 3000]");
  c.ntrunc = static_cast<int>(ntrunc);
  const long k = int_key(j, "k");
  require(k >= 1 && k <= 1000, "k", "must be in [1, 1000]");
  c.k = static_cast<int>(k);
  c.hasSuper = j.contains("gsuper");
  if (c.hasSuper) c.gsuper = real_key(j, "gsuper");
  const json& list = j.at("ntrunc_list");
  require(list.is_array() && list.size() >= 2, "ntrunc_list", "expected at least two integers");
  for (const json& v : list) {
    require(v.is_number_integer() && v.get<long>() >= 4 && v.get<long>() <= 3000,
            "ntrunc_list", "entries must be integers in [4, 3000]");
    c.ntruncList.push_back(v.get<int>());
  }
  for (std::size_t i = 1; i < c.ntruncList.size(); ++i)
    require(c.ntruncList[i] > c.ntruncList[i - 1], "ntrunc_list", "must be strictly ascending");
  c.format = text_key(j, "format");
  require(c.format == "csv" || c.format == "json", "format", "expected csv or json");

  c.resolved["command"] = command;
  for (const Key& key : kKeys)
    if (j.contains(key.name)) c.resolved[key.name] = j.at(key.name);
    else if (std::string(key.name) == "levels") c.resolved["levels"] = levels;
  return c;
}

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

using Cell = std::variant<double, long, std::string>;

struct Output {
  std::vector<std::string> columns;
  struct Row {
    std::string comment;  // non-empty: a "# warning" line in CSV
    std::vector<Cell> cells;
  };
  std::vector<Row> rows;
  std::vector<std::pair<std::string, json>> trailers;
  json document;  // used instead of rows when the command is record-shaped

  void warn(const std::string& text) { rows.push_back({text, {}}); }
  void add(std::vector<Cell> cells) { rows.push_back({"", std::move(cells)}); }
};

json cell_json(const Cell& c) {
  if (auto d = std::get_if<double>(&c)) return std::isfinite(*d) ? json(*d) : json(nullptr);
  if (auto l = std::get_if<long>(&c)) return *l;
  return std::get<std::string>(c);
}

std::string render(const RunConfig& cfg, const Output& out) {
  std::string s;
  if (cfg.format == "json") {
    json doc;
    doc["config"] = cfg.resolved;
    if (!out.document.is_null()) {
      doc["records"] = out.document;
    } else {
      json rows = json::array(), warnings = json::array();
      for (const auto& r : out.rows) {
        if (!r.comment.empty()) {
          warnings.push_back(r.comment);
          continue;
        }
        json o;
        for (std::size_t i = 0; i < r.cells.size(); ++i) o[out.columns[i]] = cell_json(r.cells[i]);
        rows.push_back(o);
      }
      doc["rows"] = rows;
      if (!warnings.empty()) doc["warnings"] = warnings;
    }
    for (const auto& [name, value] : out.trailers) doc[name] = value;
    return doc.dump(2) + "\n";
  }
  s += "# config: " + cfg.resolved.dump() + "\n";
  if (!out.document.is_null()) {
    s += out.document.dump(2) + "\n";
  } else {
    for (std::size_t i = 0; i < out.columns.size(); ++i) s += (i ? "," : "") + out.columns[i];
    s += "\n";
    for (const auto& r : out.rows) {
      if (!r.comment.empty()) {
        s += "# warning: " + r.comment + "\n";
        continue;
      }
      for (std::size_t i = 0; i < r.cells.size(); ++i) {
        if (i) s += ",";
        const Cell& c = r.cells[i];
        if (auto d = std::get_if<double>(&c)) s += num(*d);
        else if (auto l = std::get_if<long>(&c)) s += std::to_string(*l);
        else s += std::get<std::string>(c);
      }
      s += "\n";
    }
  }
  for (const auto& [name, value] : out.trailers) s += "# " + name + ": " + value.dump() + "\n";
  return s;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("out: cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw ConfigError("out: failed writing '" + path + "'");
}

std::vector<double> g_grid(const RunConfig& c) {
  if (c.gsteps == 1) return {c.gmin};
  return linspace(c.gmin, c.gmax, c.gsteps);
}

ModelParams with_g(ModelParams p, double g) {
  p.g = g;
  return p;
}

Output cmd_gfunction(const RunConfig& c, json& poles) {
  const ModelParams& p = c.params;
  validate(p);
  bogolubov_frame(p);
  double emin = c.emin, emax = c.emax;
  if (!c.hasWindow) std::tie(emin, emax) = default_window(p, c.levels);
  const GOptions gopts;
  const auto samples = sample_g_grid(p, linspace(emin, emax, c.steps), Execution::Parallel, gopts);
  Output out;
  out.columns = {"E", "G_plus", "G_minus", "near_pole", "converged"};
  for (const GSample& s : samples)
    out.add({s.E, s.gPlus, s.gMinus, long(s.nearestPoleDistance < gopts.epsPole),
             long(s.converged)});
  const PoleSet ps = poles_below(p, emax);
  poles = json::array();
  for (std::size_t i = 0; i < ps.energies.size(); ++i)
    if (ps.energies[i] >= emin) poles.push_back({{"m", ps.index[i]}, {"E", ps.energies[i]}});
  return out;
}

Output cmd_spectrum(const RunConfig& c) {
  validate(c.params);
  const auto grid = g_grid(c);
  const SweepResult sw = sweep_spectrum(c.params, grid, c.levels);
  const std::string sector = sector_name(c.params.kind, c.params.sector);
  struct OracleLevels {
    bool stable = false;
    int nTrunc = 0;
    std::vector<double> plus, minus;
  };
  const auto oracle = parallel_map<OracleLevels>(
      grid.size(),
      [&](std::size_t i) {
        OracleLevels o;
        if (sw.perG[i].oracleOnly) return o;
        const ModelParams p = with_g(c.params, grid[i]);
        const StableSpectrum ss = stable_spectrum(p, c.levels);
        o.stable = ss.stable;
        o.nTrunc = ss.nTrunc;
        for (Branch b : {Branch::Plus, Branch::Minus}) {
          auto lv = ss.decomposition.class_levels(branch_class(p.kind, p.sector, b));
          lv.resize(std::min<std::size_t>(lv.size(), c.levels));
          (b == Branch::Plus ? o.plus : o.minus) = lv;
        }
        return o;
      },
      Execution::Parallel);

  Output out;
  out.columns = {"g", "level_index", "branch", "sector", "E", "source"};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const SweepPoint& pt = sw.perG[i];
    for (const auto& w : pt.warnings) out.warn(w);
    const std::string src = pt.oracleOnly ? "oracle" : "exact";
    for (Branch b : {Branch::Plus, Branch::Minus}) {
      const auto& lv = b == Branch::Plus ? pt.plus : pt.minus;
      for (std::size_t l = 0; l < lv.size(); ++l)
        out.add({pt.g, long(l), to_string(b), sector, lv[l], src});
    }
    if (pt.oracleOnly) continue;
    if (!oracle[i].stable)
      out.warn("g=" + num(pt.g) + ": oracle levels failed the stability gate");
    for (Branch b : {Branch::Plus, Branch::Minus}) {
      const auto& lv = b == Branch::Plus ? oracle[i].plus : oracle[i].minus;
      for (std::size_t l = 0; l < lv.size(); ++l)
        out.add({pt.g, long(l), to_string(b), sector, lv[l], std::string("oracle")});
    }
  }
  json crossings = json::array();
  for (const Crossing& x : sw.crossings)
    crossings.push_back({{"g", x.g}, {"E", x.E}, {"plus_level", x.plusLevel},
                         {"minus_level", x.minusLevel}, {"g_lo", x.gLo}, {"g_hi", x.gHi}});
  out.trailers.push_back({"crossings", crossings});
  return out;
}

json juddian_record(const ModelParams& family, int m) {
  const ModelKind kind = family.kind;
  const int n0 = family.sector.n0;
  const JuddianPoint a =
      juddian_analytic(kind, family.omega, family.delta, family.lambda, m, n0);
  const double gc = critical_coupling(with_g(family, a.gStar));
  const auto found = juddian_numeric(family, m, 1e-6 * gc, gc * (1 - 1e-9));
  json rec;
  rec["model"] = to_string(kind);
  rec["sector"] = sector_name(kind, a.sector);
  rec["m"] = m;
  rec["g_analytic"] = a.gStar;
  rec["E_analytic"] = a.EStar;
  const JuddianPoint* best = nullptr;
  for (const JuddianPoint& jp : found)
    if (!best || std::abs(jp.gStar - a.gStar) < std::abs(best->gStar - a.gStar)) best = &jp;
  if (best) {
    rec["g_numeric"] = best->gStar;
    rec["E_numeric"] = best->EStar;
    rec["delta_g"] = best->gStar - a.gStar;
    rec["delta_E"] = best->EStar - a.EStar;
  } else {
    rec["g_numeric"] = nullptr;
    rec["E_numeric"] = nullptr;
    rec["delta_g"] = nullptr;
    rec["delta_E"] = nullptr;
  }
  json all = json::array();
  for (const JuddianPoint& jp : found) all.push_back({{"g", jp.gStar}, {"E", jp.EStar}});
  rec["numeric_all"] = all;
  return rec;
}

Output cmd_juddian(const RunConfig& c) {
  validate(c.params);
  json recs = json::array();
  if (c.params.kind == ModelKind::TwoPhoton) {
    for (int m : {0, 1}) {
      ModelParams f = c.params;
      f.sector.fockParity = m == 0 ? FockParity::Even : FockParity::Odd;
      recs.push_back(juddian_record(f, m));
    }
  } else {
    recs.push_back(juddian_record(c.params, 0));
  }
  Output out;
  out.document = recs;
  return out;
}

Output cmd_entropy(const RunConfig& c) {
  validate(c.params);
  EntropyOptions eo;
  eo.levels = c.levels;
  eo.nTrunc = c.ntrunc;
  if (c.levels > 2) throw ConfigError("levels: entropy supports 1 (ground) or 2 (first excited)");
  const EntropyTable t = entropy_sweep(c.params, g_grid(c), eo);
  Output out;
  out.columns = {"g", "level", "S", "parity", "ambiguous"};
  for (const EntropyRow& r : t.rows)
    out.add({r.g, long(r.level), r.S, to_string(r.parity), long(r.ambiguous)});
  json jumps = json::array();
  for (const EntropyJump& j : t.jumps)
    jumps.push_back({{"level", j.level}, {"g_lo", j.gLo}, {"g_hi", j.gHi}, {"S_lo", j.SLo},
                     {"S_hi", j.SHi}, {"parity_lo", to_string(j.parityLo)},
                     {"parity_hi", to_string(j.parityHi)}});
  out.trailers.push_back({"ntrunc", t.nTrunc});
  out.trailers.push_back({"jumps", jumps});
  return out;
}

Output cmd_oracle(const RunConfig& c) {
  validate(c.params);
  const ModelParams& p = c.params;
  int n = c.ntrunc;
  if (n == 0) {
    const int perClass = (c.levels + parity_class_count(p.kind) - 1) / parity_class_count(p.kind);
    const StableSpectrum ss = stable_spectrum(p, perClass);
    n = ss.stable ? ss.certifiedAt : ss.nTrunc;
  }
  const int big = (3 * n + 1) / 2;
  DiagOptions d;
  d.vectors = false;
  d.dimCap = 1 << 20;
  const auto eds = parallel_map<EigenDecomposition>(
      2, [&](std::size_t i) { return diagonalize(build_hamiltonian(p, i ? big : n), d); },
      Execution::Parallel);
  Output out;
  out.columns = {"index", "E", "parity", "stable"};
  std::vector<int> rank(parity_class_count(p.kind), 0);
  const int count = std::min<int>(c.levels, eds[0].eigenvalues.size());
  for (int i = 0; i < count; ++i) {
    const int cls = eds[0].classes[i];
    const auto ref = eds[1].class_levels(cls);
    const int r = rank[cls]++;
    const bool stable =
        r < static_cast<int>(ref.size()) && std::abs(ref[r] - eds[0].eigenvalues[i]) < 1e-8;
    out.add({long(i), eds[0].eigenvalues[i], to_string(eds[0].parityLabels[i]), long(stable)});
  }
  out.trailers.push_back({"ntrunc", n});
  out.trailers.push_back({"compared_with", big});
  return out;
}

Output cmd_critical(const RunConfig& c) {
  validate(c.params);
  const auto grid = g_grid(c);
  const double gc = critical_coupling(c.params);
  for (double g : grid)
    if (!(std::abs(g) < gc))
      throw ValidityError("condensation grid must stay below g_c = " + num(gc), gc);
  CondensationOptions co;
  co.k = c.k;
  const auto rows = condensation_scan(c.params, grid, co);
  Output out;
  out.columns = {"g", "eta", "eta_prime"};
  for (int i = 0; i < c.k; ++i) out.columns.push_back("pole_" + std::to_string(i));
  out.columns.push_back("pole_spread");
  out.columns.push_back("oracle_spread");
  for (const auto& r : rows) {
    std::vector<Cell> cells = {r.g, r.eta, r.etaPrime};
    for (double e : r.poles) cells.push_back(e);
    cells.push_back(r.poles.back() - r.poles.front());
    cells.push_back(r.oracleSpread);
    out.add(std::move(cells));
  }
  if (c.hasSuper) {
    const SupercriticalReport rep = supercritical_scan(c.params, c.gsuper, c.ntruncList);
    json pts = json::array();
    for (const auto& pt : rep.points)
      pts.push_back({{"ntrunc", pt.nTrunc}, {"ground_energy", pt.groundEnergy}, {"slope", pt.slope}});
    json labels = json::array();
    for (auto l : rep.lowLabels) labels.push_back(to_string(l));
    json sup;
    sup["g"] = rep.g;
    sup["points"] = pts;
    sup["exponent"] = rep.exponent;
    sup["fit_residual"] = rep.fitResidual;
    sup["ground_entropy"] = rep.groundEntropy;
    sup["participation_ratio"] = rep.participationRatio;
    sup["mean_photon"] = rep.meanPhoton;
    sup["low_levels"] = rep.lowLevels;
    sup["low_labels"] = labels;
    sup["four_class_grouping"] = rep.fourClassGrouping;
    sup["diagnostics"] = rep.diagnostics;
    out.trailers.push_back({"supercritical", sup});
  }
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"Exact spectra of the anisotropic two-photon and two-mode Rabi models"};
  app.require_subcommand(1);
  app.fallthrough();
  std::map<std::string, std::string> flagValues;
  std::map<std::string, CLI::Option*> flagOpts;
  for (const Key& k : kKeys) {
    std::string flag = std::string("--") + k.name;
    for (char& ch : flag)
      if (ch == '_') ch = '-';
    flagOpts[k.name] = app.add_option(flag, flagValues[k.name], k.help);
  }
  std::string out, configPath, presetName;
  app.add_option("--out", out, "output path (stdout when omitted)");
  app.add_option("--config", configPath, "JSON config file");
  app.add_option("--preset", presetName, "figure preset fig1 ... fig7");
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"gfunction", "G_+ and G_- on an energy grid, with a pole sidecar"},
      {"spectrum", "exact and oracle levels over a coupling sweep"},
      {"juddian", "analytic and numeric level-crossing points"},
      {"entropy", "spin entanglement entropy over a coupling sweep"},
      {"oracle", "truncated-space spectrum with parity labels"},
      {"critical", "condensation table and supercritical slope fit"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  json cfg = defaults();
  if (!presetName.empty()) cfg.update(preset(presetName));
  if (!configPath.empty()) {
    std::ifstream f(configPath);
    if (!f) throw ConfigError("config: cannot read '" + configPath + "'");
    json file;
    try {
      file = json::parse(f);
    } catch (const json::parse_error& e) {
      throw ConfigError("config: invalid JSON in '" + configPath + "': " + e.what());
    }
    if (!file.is_object()) throw ConfigError("config: top level must be an object");
    for (auto it = file.begin(); it != file.end(); ++it) {
      if (it.key() == "preset" && it->is_string()) {
        if (presetName.empty()) cfg.update(preset(it->get<std::string>()));
        continue;
      }
      find_key(it.key());
      cfg[it.key()] = *it;
    }
  }
  for (const Key& k : kKeys)
    if (flagOpts[k.name]->count() > 0) cfg[k.name] = parse_flag(k, flagValues[k.name]);
  const RunConfig rc = resolve(command, cfg);

  Output result;
  json poles;
  if (command == "gfunction") result = cmd_gfunction(rc, poles);
  else if (command == "spectrum") result = cmd_spectrum(rc);
  else if (command == "juddian") result = cmd_juddian(rc);
  else if (command == "entropy") result = cmd_entropy(rc);
  else if (command == "oracle") result = cmd_oracle(rc);
  else result = cmd_critical(rc);

  if (command == "gfunction" && out.empty()) result.trailers.push_back({"poles", poles});
  const std::string text = render(rc, result);
  if (out.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
  } else {
    write_file(out, text);
    if (command == "gfunction") {
      json side;
      side["config"] = rc.resolved;
      side["poles"] = poles;
      write_file(out + ".poles.json", side.dump(2) + "\n");
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const ValidityError& e) {
    std::fprintf(stderr, "validity error: %s\n", e.what());
    return 2;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "domain error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return 3;
  }
}
