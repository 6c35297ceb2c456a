#include "rabi/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rabi/errors.hpp"
#include "rabi/oracle.hpp"

namespace rabi {

std::vector<double> RootSearch::energies(Branch b) const {
  std::vector<double> out;
  for (const auto& r : roots)
    if (r.branch == b) out.push_back(r.E);
  return out;
}

int branch_class(ModelKind kind, const SectorLabel& sector, Branch b) {
  if (kind == ModelKind::TwoMode) return b == Branch::Plus ? 0 : 1;
  const int base = sector.fockParity == FockParity::Even ? 0 : 1;
  return b == Branch::Plus ? base : base + 2;
}

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

struct Searcher {
  const ChainModel& cm;
  const ModelParams& params;
  const RootOptions& opts;
  double emin, emax;

  GSample eval(double E) const { return g_value(cm, E, opts.g); }

  RootRecord bisect(double a, double b, double ga, Branch br, bool& ok) const {
    const double tol = opts.tol * params.omega;
    ok = true;
    while (b - a > tol) {
      const double mid = 0.5 * (a + b);
      if (!(mid > a && mid < b)) break;
      const GSample s = eval(mid);
      if (!s.converged) {
        ok = false;
        break;
      }
      const double gm = s.branch(br);
      if (gm == 0) {
        a = b = mid;
        break;
      }
      if ((gm < 0) == (ga < 0)) {
        a = mid;
        ga = gm;
      } else {
        b = mid;
      }
    }
    RootRecord r;
    r.E = 0.5 * (a + b);
    r.lo = a;
    r.hi = b;
    r.branch = br;
    r.sector = params.sector;
    r.sector.branch = br;
    const GSample s = eval(r.E);
    r.residual = s.converged ? std::abs(s.branch(br)) : std::abs(ga);
    return r;
  }

  void run(int samples, std::vector<RootRecord>& roots,
           std::vector<std::string>& warnings) const {
    const double eps = 2 * opts.g.epsPole * params.omega;
    const PoleSet ps = poles_below(params, emax);
    std::vector<std::pair<double, bool>> edges{{emin, false}};
    for (std::size_t k = 0; k < ps.energies.size(); ++k) {
      const double e = ps.energies[k];
      if (e > emin && e < emax) edges.emplace_back(e, true);
    }
    edges.emplace_back(emax, false);

    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
      const double lo = edges[k].first + (edges[k].second ? eps : 0);
      const double hi = edges[k + 1].first - (edges[k + 1].second ? eps : 0);
      if (!(hi > lo)) continue;
      std::vector<GSample> s(samples);
      for (int i = 0; i < samples; ++i)
        s[i] = eval(samples == 1 ? lo : lo + (hi - lo) * i / (samples - 1));
      for (int i = 0; i < samples; ++i)
        if (!s[i].converged && s[i].nearestPoleDistance >= opts.g.epsPole * params.omega)
          warnings.push_back("G unavailable at E=" + fmt(s[i].E) +
                             "; a root may be missed near it");
      for (Branch br : {Branch::Plus, Branch::Minus}) {
        for (int i = 0; i + 1 < samples; ++i) {
          if (!s[i].converged || !s[i + 1].converged) continue;
          const double ga = s[i].branch(br), gb = s[i + 1].branch(br);
          if ((ga < 0) == (gb < 0)) continue;
          bool ok = true;
          roots.push_back(bisect(s[i].E, s[i + 1].E, ga, br, ok));
          if (!ok)
            warnings.push_back("bisection stopped early near E=" + fmt(roots.back().E));
        }
      }
    }

    // Removable poles carry a level shared by both branches.
    for (std::size_t k = 0; k < ps.energies.size(); ++k) {
      const double e = ps.energies[k];
      if (!(e >= emin && e <= emax)) continue;
      const JuddianNumerator jn = juddian_numerator(cm, e, ps.index[k]);
      const double rel = jn.scale > 0 ? std::abs(jn.weighted) / jn.scale : 0;
      if (rel < opts.removable) {
        for (Branch br : {Branch::Plus, Branch::Minus}) {
          RootRecord r;
          r.E = r.lo = r.hi = e;
          r.branch = br;
          r.sector = params.sector;
          r.sector.branch = br;
          r.residual = rel;
          r.method = RootMethod::Exceptional;
          roots.push_back(r);
        }
      }
    }

    std::stable_sort(roots.begin(), roots.end(), [](const RootRecord& a, const RootRecord& b) {
      if (a.E != b.E) return a.E < b.E;
      return a.branch == Branch::Plus && b.branch == Branch::Minus;
    });
    const double dd = opts.dedup * params.omega;
    std::vector<RootRecord> kept;
    for (const auto& r : roots) {
      bool dup = false;
      for (auto it = kept.rbegin(); it != kept.rend() && r.E - it->E <= dd; ++it)
        if (it->branch == r.branch) dup = true;
      if (!dup) kept.push_back(r);
    }
    roots = std::move(kept);
  }
};

std::vector<int> oracle_counts(const ModelParams& params, double emin, double emax,
                               int levels) {
  StabilityOptions so;
  const StableSpectrum ss = stable_spectrum(params, levels, so);
  std::vector<int> counts;
  for (Branch br : {Branch::Plus, Branch::Minus}) {
    int c = 0;
    for (double e : ss.decomposition.class_levels(branch_class(params.kind, params.sector, br)))
      if (e >= emin && e <= emax) ++c;
    counts.push_back(c);
  }
  return counts;
}

}  // namespace

RootSearch find_roots(const ModelParams& params, double emin, double emax,
                      const RootOptions& opts) {
  if (!(std::isfinite(emin) && std::isfinite(emax) && emin < emax))
    throw ConfigError("root window must be finite with emin < emax");
  const BogolubovFrame fr = bogolubov_frame(params);
  const ChainModel cm(params, fr);
  Searcher s{cm, params, opts, emin, emax};
  RootSearch out;
  s.run(opts.samples, out.roots, out.warnings);
  if (!opts.oracleCheck) return out;

  const int levels = static_cast<int>(poles_below(params, emax).energies.size()) + 2;
  const std::vector<int> want = oracle_counts(params, emin, emax, levels);
  auto mismatch = [&](const RootSearch& rs) {
    return static_cast<int>(rs.energies(Branch::Plus).size()) != want[0] ||
           static_cast<int>(rs.energies(Branch::Minus).size()) != want[1];
  };
  if (mismatch(out)) {
    RootSearch fine;
    s.run(4 * opts.samples, fine.roots, fine.warnings);
    out = std::move(fine);
    if (mismatch(out))
      out.warnings.push_back(
          "root count differs from the oracle in [" + fmt(emin) + ", " + fmt(emax) +
          "]: found " + std::to_string(out.energies(Branch::Plus).size()) + "/" +
          std::to_string(out.energies(Branch::Minus).size()) + ", oracle " +
          std::to_string(want[0]) + "/" + std::to_string(want[1]));
  }
  return out;
}

std::pair<double, double> default_window(const ModelParams& params, int nLevels) {
  const BogolubovFrame fr = bogolubov_frame(params);
  double lo = -params.omega;
  double hi = params.omega * fr.etaPrime * (2 * nLevels + 1);
  StabilityOptions so;
  so.nStart = 40;
  so.tol = 1e-6;
  const StableSpectrum ss = stable_spectrum(params, nLevels, so);
  for (Branch br : {Branch::Plus, Branch::Minus}) {
    const auto lv =
        ss.decomposition.class_levels(branch_class(params.kind, params.sector, br));
    if (lv.empty()) continue;
    lo = std::min(lo, lv.front() - 0.5 * params.omega);
    const std::size_t k = std::min<std::size_t>(nLevels, lv.size()) - 1;
    hi = std::max(hi, lv[k] + 0.5 * params.omega);
  }
  return {lo, hi};
}

JuddianPoint juddian_analytic(ModelKind kind, double omega, double delta,
                              double lambda, int index, int n0) {
  if (lambda == 1 && delta != 0)
    throw DomainError("no Juddian solution from the closed form at lambda = 1");
  double g2 = 0;
  if (kind == ModelKind::TwoPhoton) {
    if (index != 0 && index != 1)
      throw DomainError("closed-form Juddian points exist for index 0 and 1 only");
    const double mult = index == 0 ? 1.0 : 3.0;
    g2 = 2 * omega * delta / (mult * (1 - lambda * lambda));
  } else {
    if (index != 0)
      throw DomainError("closed-form two-mode Juddian point exists for m = 0 only");
    g2 = 4 * delta * omega / ((n0 + 1) * (1 - lambda * lambda));
  }
  if (!(g2 >= 0) || !std::isfinite(g2))
    throw DomainError("no real Juddian coupling for these parameters");
  ModelParams p;
  p.kind = kind;
  p.omega = omega;
  p.delta = delta;
  p.lambda = lambda;
  p.g = std::sqrt(g2);
  p.sector.n0 = n0;
  p.sector.fockParity = index % 2 == 0 ? FockParity::Even : FockParity::Odd;
  const BogolubovFrame fr = try_bogolubov_frame(p);
  if (!fr.valid)
    throw DomainError("Juddian coupling " + fmt(p.g) +
                      " is not below g_c = " + fmt(fr.gCritical));
  JuddianPoint jp;
  jp.m = index;
  jp.gStar = p.g;
  jp.sector = p.sector;
  jp.kind = JuddianKind::Analytic;
  if (kind == ModelKind::TwoPhoton)
    jp.EStar = omega * fr.etaPrime * (index + 0.5) - 0.5 * omega;
  else
    jp.EStar = omega * fr.etaPrime * (n0 + 1) - omega;
  return jp;
}

std::vector<JuddianPoint> juddian_numeric(const ModelParams& family, int m,
                                          double gLo, double gHi, int scan) {
  ModelParams p = family;
  if (p.kind == ModelKind::TwoPhoton)
    p.sector.fockParity = m % 2 == 0 ? FockParity::Even : FockParity::Odd;
  p.g = 0;
  const double gc = critical_coupling(p);
  const double lo = std::max(gLo, 0.0), hi = std::min(gHi, gc * (1 - 1e-9));
  if (!(hi > lo) || scan < 2) throw ConfigError("empty Juddian scan range");

  auto numerator = [&](double g, double& E, double& rel, double& f) {
    ModelParams q = p;
    q.g = g;
    const ChainModel cm(q, bogolubov_frame(q));
    E = cm.pole(m);
    f = cm.f(m, E);
    const JuddianNumerator jn = juddian_numerator(cm, E, m);
    rel = jn.scale > 0 ? std::abs(jn.weighted) / jn.scale : 0;
    return jn.weighted;
  };

  std::vector<JuddianPoint> out;
  double E, rel, f;
  double ga = lo, na = numerator(std::max(lo, 1e-9 * gc), E, rel, f);
  for (int i = 1; i < scan; ++i) {
    const double gb = lo + (hi - lo) * i / (scan - 1);
    const double nb = numerator(gb, E, rel, f);
    if (na != 0 && nb != 0 && (na < 0) != (nb < 0)) {
      double a = ga, b = gb, fa = na;
      while (b - a > 1e-9 * std::max(1.0, std::abs(b))) {
        const double mid = 0.5 * (a + b);
        const double nm = numerator(mid, E, rel, f);
        if (nm == 0) {
          a = b = mid;
          break;
        }
        if ((nm < 0) == (fa < 0)) {
          a = mid;
          fa = nm;
        } else {
          b = mid;
        }
      }
      const double g = 0.5 * (a + b);
      numerator(g, E, rel, f);
      if (rel < 1e-6 && std::abs(f) > 1e-8 * p.omega) {
        JuddianPoint jp;
        jp.m = m;
        jp.gStar = g;
        jp.EStar = E;
        jp.kind = JuddianKind::Numeric;
        jp.sector = p.sector;
        out.push_back(jp);
      }
    }
    ga = gb;
    na = nb;
  }
  return out;
}

namespace {

struct Levels {
  std::vector<double> plus, minus;
  std::vector<std::string> warnings;
};

Levels exact_levels(const ModelParams& p, int nLevels, const RootOptions& ro) {
  const auto [lo, hi] = default_window(p, nLevels);
  RootSearch rs = find_roots(p, lo, hi, ro);
  Levels L;
  L.plus = rs.energies(Branch::Plus);
  L.minus = rs.energies(Branch::Minus);
  if (static_cast<int>(L.plus.size()) > nLevels) L.plus.resize(nLevels);
  if (static_cast<int>(L.minus.size()) > nLevels) L.minus.resize(nLevels);
  L.warnings = std::move(rs.warnings);
  return L;
}

}  // namespace

SweepResult sweep_spectrum(const ModelParams& family, const std::vector<double>& gGrid,
                           int nLevels, const SweepOptions& opts) {
  if (nLevels < 1) throw ConfigError("nLevels must be positive");
  SweepResult res;
  res.gGrid = gGrid;
  const double gc = critical_coupling(family);
  res.perG = parallel_map<SweepPoint>(
      gGrid.size(),
      [&](std::size_t i) {
        SweepPoint pt;
        pt.g = gGrid[i];
        ModelParams p = family;
        p.g = pt.g;
        if (std::abs(pt.g) >= gc) {
          pt.oracleOnly = true;
          DiagOptions d;
          d.vectors = false;
          const EigenDecomposition ed =
              diagonalize(build_hamiltonian(p, opts.supercriticalTrunc), d);
          pt.plus = ed.class_levels(branch_class(p.kind, p.sector, Branch::Plus));
          pt.minus = ed.class_levels(branch_class(p.kind, p.sector, Branch::Minus));
          pt.plus.resize(std::min<std::size_t>(nLevels, pt.plus.size()));
          pt.minus.resize(std::min<std::size_t>(nLevels, pt.minus.size()));
          pt.warnings.push_back("g=" + fmt(pt.g) + " is not below g_c=" + fmt(gc) +
                                "; oracle levels at nTrunc=" +
                                std::to_string(opts.supercriticalTrunc));
          return pt;
        }
        Levels L = exact_levels(p, nLevels, opts.roots);
        pt.plus = std::move(L.plus);
        pt.minus = std::move(L.minus);
        pt.warnings = std::move(L.warnings);
        return pt;
      },
      opts.exec);

  struct Candidate {
    std::size_t k;
    int i, j;
  };
  std::vector<Candidate> cands;
  for (std::size_t k = 0; k + 1 < res.perG.size(); ++k) {
    const SweepPoint &a = res.perG[k], &b = res.perG[k + 1];
    if (a.oracleOnly || b.oracleOnly) continue;
    const std::size_t np = std::min(a.plus.size(), b.plus.size());
    const std::size_t nm = std::min(a.minus.size(), b.minus.size());
    for (std::size_t i = 0; i < np; ++i)
      for (std::size_t j = 0; j < nm; ++j) {
        const double da = a.plus[i] - a.minus[j], db = b.plus[i] - b.minus[j];
        if (da != 0 && (da < 0) != (db < 0)) cands.push_back({k, int(i), int(j)});
      }
  }

  res.crossings = parallel_map<Crossing>(
      cands.size(),
      [&](std::size_t c) {
        const Candidate& cd = cands[c];
        double gl = res.perG[cd.k].g, gr = res.perG[cd.k + 1].g;
        double dl = res.perG[cd.k].plus[cd.i] - res.perG[cd.k].minus[cd.j];
        double E = 0.5 * (res.perG[cd.k].plus[cd.i] + res.perG[cd.k].minus[cd.j]);
        while (gr - gl > opts.crossingTol) {
          const double gm = 0.5 * (gl + gr);
          ModelParams p = family;
          p.g = gm;
          Levels L = exact_levels(p, nLevels, opts.roots);
          if (static_cast<int>(L.plus.size()) <= cd.i ||
              static_cast<int>(L.minus.size()) <= cd.j || !L.warnings.empty())
            break;
          const double dm = L.plus[cd.i] - L.minus[cd.j];
          E = 0.5 * (L.plus[cd.i] + L.minus[cd.j]);
          if (dm == 0) {
            gl = gr = gm;
            break;
          }
          if ((dm < 0) == (dl < 0)) {
            gl = gm;
            dl = dm;
          } else {
            gr = gm;
          }
        }
        Crossing x;
        x.g = 0.5 * (gl + gr);
        x.E = E;
        x.plusLevel = cd.i;
        x.minusLevel = cd.j;
        x.gLo = gl;
        x.gHi = gr;
        return x;
      },
      opts.exec);
  return res;
}

double rwa_ground_estimate(int n, const ModelParams& p) {
  if (n < 0) throw ConfigError("n must be non-negative");
  const double w = p.omega, D = p.delta, g = p.g;
  return (n + 1) * w / 2 - std::sqrt((w - D) * (w - D) + g * g * (n + 1.0) * (n + 2.0));
}

}  // namespace rabi
