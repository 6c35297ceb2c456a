// Acceptance run: one PASS/FAIL line per criterion. With no arguments every
// criterion runs; otherwise only the listed ones. Exit status is nonzero when
// any selected criterion fails.
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rabi/errors.hpp"
#include "rabi/observables.hpp"
#include "rabi/oracle.hpp"
#include "rabi/spectrum.hpp"

using namespace rabi;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    note((ok ? "ok   " : "FAIL ") + what);
  }
  void note(const std::string& what) { detail += "\n    " + what; }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

ModelParams make(ModelKind kind, double delta, double lambda, double g = 0) {
  ModelParams p;
  p.kind = kind;
  p.omega = 1;
  p.delta = delta;
  p.lambda = lambda;
  p.g = g;
  return p;
}

// Random valid parameter sets, fixed seed so that every run is identical.
std::vector<ModelParams> random_sets(int count, unsigned seed, bool zeroDelta = false) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0, 1);
  std::vector<ModelParams> out;
  for (int i = 0; i < count; ++i) {
    ModelParams p;
    p.kind = i % 2 ? ModelKind::TwoMode : ModelKind::TwoPhoton;
    p.omega = 0.5 + 1.5 * uni(rng);
    p.delta = zeroDelta ? 0.0 : p.omega * (0.05 + 0.75 * uni(rng));
    p.lambda = 0.1 + 1.4 * uni(rng);
    p.sector.n0 = static_cast<int>(uni(rng) * 3);
    p.sector.fockParity = uni(rng) < 0.5 ? FockParity::Even : FockParity::Odd;
    p.g = (0.05 + 0.8 * uni(rng)) * critical_coupling(p);
    if (uni(rng) < 0.3) p.g = -p.g;
    out.push_back(p);
  }
  return out;
}

std::string describe(const ModelParams& p) {
  char buf[200];
  std::snprintf(buf, sizeof buf, "%s %s w=%.4f D=%.4f l=%.4f g=%.4f", to_string(p.kind).c_str(),
                sector_name(p.kind, p.sector).c_str(), p.omega, p.delta, p.lambda, p.g);
  return buf;
}

const Crossing* find_crossing(const SweepResult& sw, double g) {
  const Crossing* best = nullptr;
  for (const Crossing& c : sw.crossings)
    if (c.plusLevel == 0 && c.minusLevel == 0 &&
        (!best || std::abs(c.g - g) < std::abs(best->g - g)))
      best = &c;
  return best;
}

void check_crossing(Outcome& o, const char* label, const ModelParams& family,
                    const std::vector<double>& grid, double g, double E) {
  const SweepResult sw = sweep_spectrum(family, grid, 2);
  const Crossing* c = find_crossing(sw, g);
  if (!c) {
    o.require(false, std::string(label) + ": no ground crossing detected");
    return;
  }
  o.require(std::abs(c->g - g) <= 1e-3 && std::abs(c->E - E) <= 1e-3,
            std::string(label) + fmt(": sweep crossing g=%.6f E=%.6f (target %.4f, %.4f)", c->g,
                                     c->E, g, E));
}

Outcome criterion1() {
  Outcome o;
  const ModelParams f = make(ModelKind::TwoPhoton, 0.2, 0.25);
  check_crossing(o, "even", f, linspace(0, 0.79, 80), 0.6532, -0.2483);
  const JuddianPoint a = juddian_analytic(ModelKind::TwoPhoton, 1, 0.2, 0.25, 0);
  const double gRef = 4 * std::sqrt(2.0) / (5 * std::sqrt(3.0));
  const double ERef = 0.5 * std::sqrt(19.0 / 75) - 0.5;
  const double eps = 4 * std::numeric_limits<double>::epsilon();
  o.require(std::abs(a.gStar - gRef) <= eps * gRef && std::abs(a.EStar - ERef) <= eps,
            fmt("closed form g*=%.17g (dg=%.1e) E*=%.17g (dE=%.1e)", a.gStar, a.gStar - gRef,
                a.EStar, a.EStar - ERef));
  return o;
}

Outcome criterion2() {
  Outcome o;
  ModelParams f = make(ModelKind::TwoPhoton, 0.2, 0.25);
  f.sector.fockParity = FockParity::Odd;
  check_crossing(o, "odd", f, linspace(0, 0.79, 80), 0.3771, 0.7689);
  return o;
}

Outcome criterion3() {
  Outcome o;
  ModelParams f = make(ModelKind::TwoMode, 0.2, 0.5);
  check_crossing(o, "n0=0", f, linspace(0, 1.3, 131), 1.0328, -0.3890);
  f.sector.n0 = 1;
  check_crossing(o, "n0=1", f, linspace(0, 1.3, 131), 0.7303, 0.6452);
  return o;
}

// Lowest `levels` roots of both branches against the stable oracle; returns
// the worst deviation (inf on a count mismatch).
double root_oracle_deviation(const ModelParams& p, int levels, std::string& why) {
  const auto [lo, hi] = default_window(p, levels);
  const RootSearch rs = find_roots(p, lo, hi);
  const StableSpectrum ss = stable_spectrum(p, levels);
  if (!ss.stable) {
    why = "oracle not stable";
    return INFINITY;
  }
  double worst = 0;
  for (Branch b : {Branch::Plus, Branch::Minus}) {
    const auto lv = ss.decomposition.class_levels(branch_class(p.kind, p.sector, b));
    const auto r = rs.energies(b);
    if (static_cast<int>(r.size()) < levels || static_cast<int>(lv.size()) < levels) {
      why = "missing roots on branch " + to_string(b);
      return INFINITY;
    }
    for (int i = 0; i < levels; ++i) worst = std::max(worst, std::abs(r[i] - lv[i]));
  }
  return worst;
}

Outcome criterion4() {
  Outcome o;
  std::vector<ModelParams> sets;
  for (FockParity fp : {FockParity::Even, FockParity::Odd}) {
    ModelParams p = make(ModelKind::TwoPhoton, 0.2, 0.25, 0.3);
    p.sector.fockParity = fp;
    sets.push_back(p);
  }
  // Every random set is checked in two sectors.
  for (ModelParams p : random_sets(20, 4)) {
    sets.push_back(p);
    if (p.kind == ModelKind::TwoPhoton)
      p.sector.fockParity = p.sector.fockParity == FockParity::Even ? FockParity::Odd : FockParity::Even;
    else
      p.sector.n0 = p.sector.n0 == 0 ? 1 : 0;
    sets.push_back(p);
  }
  double worst = 0;
  for (const ModelParams& p : sets) {
    std::string why;
    const double dev = root_oracle_deviation(p, 6, why);
    worst = std::max(worst, dev);
    if (!(dev < 1e-6)) o.require(false, describe(p) + fmt(": deviation %.3e ", dev) + why);
  }
  o.require(worst < 1e-6, fmt("%.0f sector checks, worst root-oracle deviation %.3e (tol 1e-6)",
                              double(sets.size()), worst));
  return o;
}

Outcome criterion5() {
  Outcome o;
  double worst = 0;
  for (const ModelParams& base : random_sets(10, 5, true)) {
    ModelParams p = base;
    const PoleSet ps = pole_energies(p, 5);
    const StableSpectrum ss = stable_spectrum(p, 8);
    std::vector<double> levels;
    for (Branch b : {Branch::Plus, Branch::Minus})
      for (double e : ss.decomposition.class_levels(branch_class(p.kind, p.sector, b)))
        levels.push_back(e);
    double dev = 0;
    for (double e : ps.energies) {
      double best = INFINITY;
      for (double l : levels) best = std::min(best, std::abs(l - e));
      dev = std::max(dev, best);
    }
    worst = std::max(worst, dev);
    o.require(dev < 1e-8, describe(p) + fmt(": max |pole - nearest Delta=0 level| = %.3e", dev));
  }
  o.note(fmt("worst deviation %.3e (tol 1e-8)", worst));
  return o;
}

Outcome criterion6() {
  Outcome o;
  double worst = 0;
  // Kinds alternate, so this is 20 sets of each model.
  const auto sets = random_sets(40, 6);
  for (const ModelParams& p : sets) {
    double dev;
    try {
      dev = bogolubov_conjugation_check(p, 60).maxDeviation;
    } catch (const NumericError& e) {
      dev = INFINITY;
      o.note(describe(p) + ": " + e.what());
    }
    worst = std::max(worst, dev / p.omega);
    if (!(dev < 1e-10 * p.omega)) o.require(false, describe(p) + fmt(": deviation %.3e", dev));
  }
  o.require(worst < 1e-10, fmt("%.0f parameter sets, worst deviation %.3e omega (tol 1e-10)",
                               double(sets.size()), worst));
  return o;
}

void check_jump(Outcome& o, const char* label, const ModelParams& family,
                const std::vector<double>& grid, double gStar) {
  const EntropyTable t = entropy_sweep(family, grid);
  const EntropyJump* hit = nullptr;
  for (const EntropyJump& j : t.jumps)
    if (j.level == 0 && j.gLo <= gStar && gStar <= j.gHi) hit = &j;
  if (!hit) {
    o.require(false, std::string(label) + ": no ground-state jump bracket contains g*");
    return;
  }
  o.require(true, std::string(label) + fmt(": jump |dS|=%.4f in [%.9f, %.9f] contains %.9f",
                                           std::abs(hit->SHi - hit->SLo), hit->gLo, hit->gHi, gStar));
  o.require(hit->parityLo == ParityLabel::PlusOne && hit->parityHi == ParityLabel::MinusOne,
            std::string(label) + ": ground parity " + to_string(hit->parityLo) + " -> " +
                to_string(hit->parityHi));
}

Outcome criterion7() {
  Outcome o;
  check_jump(o, "two-photon even", make(ModelKind::TwoPhoton, 0.2, 0.25), linspace(0, 0.79, 80),
             4 * std::sqrt(2.0) / (5 * std::sqrt(3.0)));
  check_jump(o, "two-mode n0=0", make(ModelKind::TwoMode, 0.2, 0.5), linspace(0, 1.2, 61),
             4 / std::sqrt(15.0));
  return o;
}

Outcome criterion8() {
  Outcome o;
  const ModelParams f = make(ModelKind::TwoPhoton, 0.2, 0.25);
  const double gc = critical_coupling(f);
  double prevEta = 2;
  bool monotone = true;
  for (double g : {0.4, 0.6, 0.7, 0.79, 0.799, gc - 1e-4}) {
    const double eta = bogolubov_frame(make(ModelKind::TwoPhoton, 0.2, 0.25, g)).eta;
    monotone = monotone && eta < prevEta;
    prevEta = eta;
  }
  o.require(monotone && prevEta < 0.05,
            fmt("eta decreases towards g_c; eta(g_c - 1e-4) = %.4e", prevEta));
  const auto poles = pole_energies(make(ModelKind::TwoPhoton, 0.2, 0.25, gc - 1e-4), 5).energies;
  double dev = 0;
  for (double e : poles) dev = std::max(dev, std::abs(e + 0.5));
  o.require(dev <= 1e-3, fmt("first 5 poles at g_c - 1e-4: [%.5f .. %.5f], max |E + 1/2| = %.3e "
                             "(tol 1e-3)",
                             poles.front(), poles.back(), dev));
  CondensationOptions co;
  co.k = 5;
  const auto rows = condensation_scan(f, {0.4, 0.792}, co);
  const double ratio = rows[0].oracleSpread / rows[1].oracleSpread;
  o.require(ratio >= 10, fmt("oracle spread E_5 - E_0: %.5f at g=0.4, %.5f at g=0.792, ratio %.2f "
                             "(need >= 10)",
                             rows[0].oracleSpread, rows[1].oracleSpread, ratio));
  return o;
}

Outcome criterion9() {
  Outcome o;
  const SupercriticalReport r =
      supercritical_scan(make(ModelKind::TwoPhoton, 0.2, 0.25), 0.85, {200, 400, 600, 800, 1000});
  o.require(r.participationRatio > 20,
            fmt("ground photon participation ratio at N=200: %.3f (need > 20)", r.participationRatio));
  o.require(r.groundEntropy > 0.95, fmt("ground entropy at N=200: %.6f (need > 0.95)", r.groundEntropy));
  o.require(r.exponent >= 0.9 && r.exponent <= 1.3,
            fmt("slope exponent x = %.4f, fit residual %.2e (need [0.9, 1.3])", r.exponent,
                r.fitResidual));
  o.note(fmt("mean photon number %.2f; four-class grouping of the lowest 12 levels: ",
             r.meanPhoton) + (r.fourClassGrouping ? "yes" : "no"));
  for (const auto& d : r.diagnostics) o.note("diagnostic: " + d);
  return o;
}

int run_cli(const std::string& args) {
  const int status = std::system((std::string(RABI_CLI) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Outcome criterion10() {
  Outcome o;
  double uv = 0;
  for (const ModelParams& p : random_sets(200, 10)) {
    const BogolubovFrame f = bogolubov_frame(p);
    uv = std::max(uv, std::abs(f.u * f.u - f.v * f.v - 1));
  }
  o.require(uv < 1e-12, fmt("u^2 - v^2 = 1 over 200 sets, worst %.2e", uv));

  double flip = 0;
  for (ModelParams p : random_sets(10, 11)) {
    p.g = std::abs(p.g);
    ModelParams q = p;
    q.g = -p.g;
    const auto a = diagonalize(build_hamiltonian(p, 120)).eigenvalues;
    const auto b = diagonalize(build_hamiltonian(q, 120)).eigenvalues;
    flip = std::max(flip, (a - b).cwiseAbs().maxCoeff());
    const auto [lo, hi] = default_window(p, 4);
    const auto ra = find_roots(p, lo, hi).roots, rb = find_roots(q, lo, hi).roots;
    if (ra.size() != rb.size()) flip = INFINITY;
    else
      for (std::size_t i = 0; i < ra.size(); ++i) flip = std::max(flip, std::abs(ra[i].E - rb[i].E));
  }
  o.require(flip < 1e-10, fmt("g -> -g: worst oracle/root shift %.2e (tol 1e-10)", flip));

  bool conserved = true;
  for (const ModelParams& p : random_sets(6, 12)) {
    const TruncatedHamiltonian H = build_hamiltonian(p, 40);
    const ParityOperator P = parity_matrix(p, 40);
    for (int i = 0; i < H.dim; ++i)
      for (int j = 0; j < H.dim; ++j)
        if (H.entries(i, j) != 0 && P.classes[i] != P.classes[j]) conserved = false;
  }
  o.require(conserved, "parity classes are never coupled by H");

  double res = 0, ovl = 0;
  struct J {
    ModelKind kind;
    double lambda;
    int m, n0;
  };
  for (const J& j : {J{ModelKind::TwoPhoton, 0.25, 0, 0}, J{ModelKind::TwoPhoton, 0.25, 1, 0},
                     J{ModelKind::TwoMode, 0.5, 0, 0}, J{ModelKind::TwoMode, 0.5, 0, 1}}) {
    const JuddianPoint jp = juddian_analytic(j.kind, 1, 0.2, j.lambda, j.m, j.n0);
    ModelParams p = make(j.kind, 0.2, j.lambda, jp.gStar);
    p.sector = jp.sector;
    const std::complex<double> C = j.m == 1 ? std::complex<double>(0, 1) : 1.0;
    const SpinBosonState a = assemble_crossing_state(p, C), b = assemble_crossing_state(p, -C);
    res = std::max({res, eigen_residual(p, a, jp.EStar), eigen_residual(p, b, jp.EStar)});
    ovl = std::max(ovl, std::abs(overlap(a, b)));
  }
  o.require(res < 1e-7 && ovl < 1e-10,
            fmt("Psi_C at four crossings: worst residual %.2e, worst overlap %.2e", res, ovl));

  const ModelParams f = make(ModelKind::TwoPhoton, 0.2, 0.25);
  SweepOptions s1, s2;
  s1.exec = Execution::Serial;
  const auto grid = linspace(0, 0.79, 40);
  const auto A = sweep_spectrum(f, grid, 2, s1), B = sweep_spectrum(f, grid, 2, s2);
  bool same = A.crossings.size() == B.crossings.size();
  for (std::size_t i = 0; same && i < grid.size(); ++i)
    same = A.perG[i].plus == B.perG[i].plus && A.perG[i].minus == B.perG[i].minus;
  const std::string d = ACCEPT_DIR;
  const std::string args = "gfunction --preset fig1 --steps 500 --out ";
  const bool cli = run_cli(args + d + "/det_a.csv") == 0 && run_cli(args + d + "/det_b.csv") == 0 &&
                   slurp(d + "/det_a.csv") == slurp(d + "/det_b.csv") &&
                   slurp(d + "/det_a.csv.poles.json") == slurp(d + "/det_b.csv.poles.json");
  o.require(same && cli, std::string("determinism: serial/parallel sweep ") +
                             (same ? "identical" : "DIFFER") + ", CLI rerun " +
                             (cli ? "byte-identical" : "DIFFERS"));
  return o;
}

struct Criterion {
  const char* title;
  double budget;  // seconds
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {"two-photon even Juddian point", 30, criterion1},
      {"two-photon odd Juddian point", 30, criterion2},
      {"two-mode Juddian points", 60, criterion3},
      {"exact roots match the stable oracle", 300, criterion4},
      {"pole identity against the Delta=0 oracle", 120, criterion5},
      {"conjugation certification at nTrunc=60", 120, criterion6},
      {"entropy discontinuity at the crossings", 300, criterion7},
      {"condensation at g_c", 300, criterion8},
      {"supercritical behavior", 1200, criterion9},
      {"property suites", 300, criterion10},
  };
  std::vector<int> pick;
  for (int i = 1; i < argc; ++i) pick.push_back(std::atoi(argv[i]));
  if (pick.empty())
    for (int i = 1; i <= 10; ++i) pick.push_back(i);
  int failed = 0;
  for (int id : pick) {
    if (id < 1 || id > 10) {
      std::printf("unknown criterion %d\n", id);
      return 2;
    }
    const Criterion& c = all[id - 1];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(secs < c.budget, fmt("runtime %.1f s (budget %.0f s)", secs, c.budget));
    std::printf("criterion %2d: %s  %s%s\n", id, o.pass ? "PASS" : "FAIL", c.title, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed ? 1 : 0;
}
