#include "rabi/observables.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "rabi/errors.hpp"
#include "rabi/recurrence.hpp"
#include "rabi/spectrum.hpp"

namespace rabi {

using cd = std::complex<double>;

double SpinBosonState::norm2() const {
  double s = 0;
  for (const cd& x : up) s += std::norm(x);
  for (const cd& x : down) s += std::norm(x);
  return s;
}

void SpinBosonState::normalize() {
  const double n = std::sqrt(norm2());
  if (!(n > 0)) throw ContractError("cannot normalize a zero state");
  for (cd& x : up) x /= n;
  for (cd& x : down) x /= n;
  normalized = true;
}

namespace {

// Multiplication by i^k done by component swaps, so repeated application is
// exact.
cd times_i_power(cd x, int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return x;
    case 1: return {-x.imag(), x.real()};
    case 2: return {-x.real(), -x.imag()};
    default: return {x.imag(), -x.real()};
  }
}

}  // namespace

SpinBosonState parity_partner(const SpinBosonState& s) {
  SpinBosonState out = s;
  const int unit = s.kind == ModelKind::TwoPhoton ? 1 : 2;  // i^n or (-1)^n
  for (std::size_t n = 0; n < s.up.size(); ++n) {
    out.up[n] = times_i_power(s.up[n], unit * static_cast<int>(n) + 2);
    out.down[n] = times_i_power(s.down[n], unit * static_cast<int>(n));
  }
  return out;
}

cd overlap(const SpinBosonState& a, const SpinBosonState& b) {
  cd s = 0;
  const std::size_t n = std::min(a.up.size(), b.up.size());
  for (std::size_t i = 0; i < n; ++i)
    s += std::conj(a.up[i]) * b.up[i] + std::conj(a.down[i]) * b.down[i];
  return s;
}

double eigen_residual(const ModelParams& params, const SpinBosonState& s, double E) {
  const int nTrunc = static_cast<int>(s.up.size()) - 1;
  const TruncatedHamiltonian H = build_hamiltonian(params, nTrunc);
  Eigen::VectorXcd v(H.dim);
  for (int n = 0; n <= nTrunc; ++n) {
    v[H.index(n, kUp)] = s.up[n];
    v[H.index(n, kDown)] = s.down[n];
  }
  const Eigen::VectorXcd r = H.entries.cast<cd>() * v - E * v;
  return r.norm();
}

SpinBosonState assemble_crossing_state(const ModelParams& params, cd C,
                                       const CrossingOptions& opts) {
  const BogolubovFrame fr = bogolubov_frame(params);
  const bool tp = params.kind == ModelKind::TwoPhoton;
  const bool odd = tp && params.sector.fockParity == FockParity::Odd;
  const int m = odd ? 1 : 0;
  const bool realC = std::abs(std::abs(C.real()) - 1) < 1e-12 && C.imag() == 0;
  const bool imagC = std::abs(std::abs(C.imag()) - 1) < 1e-12 && C.real() == 0;
  if (odd ? !imagC : !realC)
    throw ConfigError(odd ? "C must be +i or -i in the odd sector"
                          : "C must be +1 or -1");

  // Validate against the numerically located crossing.
  const double gc = fr.gCritical, g = std::abs(params.g);
  const double w = 1e-3 * gc;
  ModelParams fam = params;
  fam.g = g;
  bool found = false;
  for (const JuddianPoint& jp :
       juddian_numeric(fam, m, std::max(0.0, g - w), std::min(gc, g + w), 21))
    if (std::abs(jp.gStar - g) < 1e-6) found = true;
  if (!found)
    throw DomainError("parameters are not at a Juddian crossing for index " +
                      std::to_string(m));
  const ChainModel cm(params, fr);
  const double E = cm.pole(m);

  int nTrunc = opts.nTrunc;
  if (nTrunc <= 0) {
    nTrunc = 16;
    while (vacuum_tail_mass(params.kind, fr, params.sector.n0, nTrunc) > 1e-28 ||
           nTrunc < 4 * (m + 4))
      nTrunc *= 2;
  }
  std::vector<double> phi = tp ? alpha_fock(fr, m, nTrunc)
                               : two_mode_vacuum(fr, params.sector.n0, nTrunc);

  // Psi = U Phi with Phi proportional to (sin2b phi, cos2b phi).
  const double c = std::cos(fr.beta), s = std::sin(fr.beta);
  const double a1 = fr.sin2b, a2 = fr.cos2b;
  SpinBosonState psi;
  psi.kind = params.kind;
  psi.basis = tp ? StateBasis::BareFock : StateBasis::PairLadder;
  psi.n0 = params.sector.n0;
  psi.up.resize(nTrunc + 1);
  psi.down.resize(nTrunc + 1);
  for (int n = 0; n <= nTrunc; ++n) {
    psi.up[n] = (c * a1 - s * a2) * phi[n];
    psi.down[n] = (s * a1 + c * a2) * phi[n];
  }
  const SpinBosonState bar = parity_partner(psi);
  SpinBosonState out = psi;
  for (int n = 0; n <= nTrunc; ++n) {
    out.up[n] = C * psi.up[n] + bar.up[n];
    out.down[n] = C * psi.down[n] + bar.down[n];
  }
  out.normalize();
  const double res = eigen_residual(params, out, E);
  if (!(res < opts.residualTol))
    throw DomainError("crossing state residual " + std::to_string(res) +
                      " exceeds tolerance; parameters are not degenerate");
  return out;
}

SpinBosonState state_from_oracle(const EigenDecomposition& ed, int column) {
  if (ed.eigenvectors.cols() == 0)
    throw ContractError("decomposition was computed without eigenvectors");
  SpinBosonState s;
  s.kind = ed.kind;
  s.basis = ed.kind == ModelKind::TwoPhoton ? StateBasis::BareFock : StateBasis::PairLadder;
  const int n = ed.nTrunc + 1;
  s.up.resize(n);
  s.down.resize(n);
  for (int k = 0; k < n; ++k) {
    s.up[k] = ed.eigenvectors(TruncatedHamiltonian::index(k, kUp), column);
    s.down[k] = ed.eigenvectors(TruncatedHamiltonian::index(k, kDown), column);
  }
  s.normalized = true;
  return s;
}

namespace {

void require_normalized(const SpinBosonState& s) {
  if (std::abs(s.norm2() - 1) > 1e-10)
    throw ContractError("state is not normalized (norm^2 = " +
                        std::to_string(s.norm2()) + ")");
}

}  // namespace

ReducedSpinDensity reduced_spin_density(const SpinBosonState& s) {
  require_normalized(s);
  ReducedSpinDensity r;
  cd r11 = 0, r22 = 0, r12 = 0;
  for (std::size_t n = 0; n < s.up.size(); ++n) {
    r11 += std::norm(s.up[n]);
    r22 += std::norm(s.down[n]);
    r12 += s.up[n] * std::conj(s.down[n]);
  }
  r.rho << r11, r12, std::conj(r12), r22;
  return r;
}

double entanglement_entropy(const ReducedSpinDensity& r) {
  const double a = r.rho(0, 0).real(), d = r.rho(1, 1).real();
  const double b = std::abs(r.rho(0, 1));
  const double disc = std::sqrt((a - d) * (a - d) + 4 * b * b);
  double S = 0;
  for (double l : {0.5 * (a + d + disc), 0.5 * (a + d - disc)}) {
    l = std::clamp(l, 0.0, 1.0);
    if (l > 0) S -= l * std::log2(l);
  }
  return std::clamp(S, 0.0, 1.0);
}

std::vector<double> photon_number_distribution(const SpinBosonState& s) {
  require_normalized(s);
  std::vector<double> p(s.up.size());
  for (std::size_t n = 0; n < s.up.size(); ++n) p[n] = std::norm(s.up[n]) + std::norm(s.down[n]);
  return p;
}

double participation_ratio(const std::vector<double>& p) {
  double s = 0;
  for (double x : p) s += x * x;
  return 1 / s;
}

namespace {

std::vector<int> allowed_classes(const ModelParams& p, bool restrictFock) {
  if (p.kind == ModelKind::TwoPhoton && restrictFock) {
    const int base = p.sector.fockParity == FockParity::Even ? 0 : 1;
    return {base, base + 2};
  }
  std::vector<int> all(parity_class_count(p.kind));
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  return all;
}

struct LevelState {
  double E;
  double S;
  ParityLabel parity;
};

// Lowest `count` eigenstates restricted to the allowed classes.
std::vector<LevelState> lowest_states(const ModelParams& p, int nTrunc,
                                      const std::vector<int>& classes, int count) {
  const EigenDecomposition ed = diagonalize(build_hamiltonian(p, nTrunc));
  std::vector<LevelState> out;
  for (int i = 0; i < ed.eigenvalues.size() && static_cast<int>(out.size()) < count; ++i) {
    if (std::find(classes.begin(), classes.end(), ed.classes[i]) == classes.end()) continue;
    const SpinBosonState s = state_from_oracle(ed, i);
    out.push_back({ed.eigenvalues[i], entanglement_entropy(reduced_spin_density(s)),
                   ed.parityLabels[i]});
  }
  return out;
}

}  // namespace

EntropyTable entropy_sweep(const ModelParams& family, const std::vector<double>& gGrid,
                           const EntropyOptions& opts) {
  if (gGrid.empty()) throw ConfigError("empty coupling grid");
  if (opts.levels < 1 || opts.levels > 2) throw ConfigError("levels must be 1 or 2");
  const std::vector<int> classes = allowed_classes(family, opts.restrictFock);
  EntropyTable table;
  table.nTrunc = opts.nTrunc;
  if (table.nTrunc <= 0) {
    ModelParams p = family;
    p.g = 0;
    for (double g : gGrid) p.g = std::max(p.g, std::abs(g));
    const StableSpectrum ss = stable_spectrum(p, opts.levels + 2);
    if (!ss.stable)
      throw NumericError("oracle truncation failed the stability gate at g=" +
                         std::to_string(p.g));
    table.nTrunc = ss.nTrunc;
  }
  const int want = opts.levels + 1;  // one extra to detect near-degeneracy

  auto states_at = [&](double g) {
    ModelParams p = family;
    p.g = g;
    return lowest_states(p, table.nTrunc, classes, want);
  };
  const auto perG = parallel_map<std::vector<LevelState>>(
      gGrid.size(), [&](std::size_t i) { return states_at(gGrid[i]); }, opts.exec);

  for (std::size_t i = 0; i < gGrid.size(); ++i) {
    const auto& st = perG[i];
    for (int l = 0; l < opts.levels && l < static_cast<int>(st.size()); ++l) {
      EntropyRow row{gGrid[i], l, st[l].E, st[l].S, st[l].parity, false};
      int partner = -1;
      if (l + 1 < static_cast<int>(st.size()) && st[l + 1].E - st[l].E < opts.degeneracyTol)
        partner = l + 1;
      if (l > 0 && st[l].E - st[l - 1].E < opts.degeneracyTol) partner = l - 1;
      if (partner >= 0) {
        row.ambiguous = true;
        table.rows.push_back(row);
        table.rows.push_back({gGrid[i], l, st[partner].E, st[partner].S, st[partner].parity, true});
      } else {
        table.rows.push_back(row);
      }
    }
  }

  struct Cand {
    int level;
    std::size_t k;
  };
  std::vector<Cand> cands;
  for (int l = 0; l < opts.levels; ++l)
    for (std::size_t k = 0; k + 1 < perG.size(); ++k) {
      if (static_cast<int>(perG[k].size()) <= l || static_cast<int>(perG[k + 1].size()) <= l)
        continue;
      if (std::abs(perG[k + 1][l].S - perG[k][l].S) > opts.jumpThreshold) cands.push_back({l, k});
    }
  const auto refined = parallel_map<EntropyJump>(
      cands.size(),
      [&](std::size_t c) {
        const int l = cands[c].level;
        EntropyJump j;
        j.level = l;
        j.gLo = gGrid[cands[c].k];
        j.gHi = gGrid[cands[c].k + 1];
        LevelState lo = perG[cands[c].k][l], hi = perG[cands[c].k + 1][l];
        while (j.gHi - j.gLo > opts.refineTol) {
          const double mid = 0.5 * (j.gLo + j.gHi);
          const auto st = states_at(mid);
          if (static_cast<int>(st.size()) <= l) break;
          const LevelState& m = st[l];
          if (std::abs(m.S - lo.S) >= std::abs(hi.S - m.S)) {
            j.gHi = mid;
            hi = m;
          } else {
            j.gLo = mid;
            lo = m;
          }
        }
        j.SLo = lo.S;
        j.SHi = hi.S;
        j.parityLo = lo.parity;
        j.parityHi = hi.parity;
        return j;
      },
      opts.exec);
  for (const auto& j : refined)
    if (std::abs(j.SHi - j.SLo) > opts.jumpThreshold) table.jumps.push_back(j);
  return table;
}

std::vector<CondensationRow> condensation_scan(const ModelParams& family,
                                               const std::vector<double>& gGrid,
                                               const CondensationOptions& opts) {
  if (opts.k < 1) throw ConfigError("k must be positive");
  return parallel_map<CondensationRow>(
      gGrid.size(),
      [&](std::size_t i) {
        ModelParams p = family;
        p.g = gGrid[i];
        const BogolubovFrame fr = bogolubov_frame(p);
        CondensationRow row;
        row.g = p.g;
        row.eta = fr.eta;
        row.etaPrime = fr.etaPrime;
        row.poles = pole_energies(p, opts.k).energies;
        const StableSpectrum ss = stable_spectrum(p, opts.k + 1);
        std::vector<double> all(ss.decomposition.eigenvalues.data(),
                                ss.decomposition.eigenvalues.data() +
                                    ss.decomposition.eigenvalues.size());
        row.oracleSpread = all[opts.k] - all[0];
        return row;
      },
      opts.exec);
}

SupercriticalReport supercritical_scan(const ModelParams& family, double g,
                                       const std::vector<int>& nTruncList,
                                       const SupercriticalOptions& opts) {
  ModelParams p = family;
  p.g = g;
  const double gc = critical_coupling(p);
  if (!(std::abs(g) > gc))
    throw DomainError("supercritical scan needs |g| > g_c = " + std::to_string(gc));
  if (nTruncList.size() < 2) throw ConfigError("need at least two cutoffs");
  if (opts.points < 2) throw ConfigError("need at least two coupling points");
  if (!std::is_sorted(nTruncList.begin(), nTruncList.end()))
    throw ConfigError("cutoff list must be ascending");

  const std::vector<double> gs = linspace(g - opts.halfWidth, g + opts.halfWidth, opts.points);
  const std::size_t nN = nTruncList.size(), nG = gs.size();
  const auto ground = parallel_map<double>(
      nN * nG,
      [&](std::size_t t) {
        ModelParams q = family;
        q.g = gs[t % nG];
        DiagOptions d;
        d.vectors = false;
        d.dimCap = 1 << 20;
        return diagonalize(build_hamiltonian(q, nTruncList[t / nG]), d).eigenvalues[0];
      },
      opts.exec);

  SupercriticalReport rep;
  rep.g = g;
  const double gm = std::accumulate(gs.begin(), gs.end(), 0.0) / nG;
  for (std::size_t a = 0; a < nN; ++a) {
    double em = 0;
    for (std::size_t b = 0; b < nG; ++b) em += ground[a * nG + b];
    em /= nG;
    double sxy = 0, sxx = 0;
    for (std::size_t b = 0; b < nG; ++b) {
      sxy += (gs[b] - gm) * (ground[a * nG + b] - em);
      sxx += (gs[b] - gm) * (gs[b] - gm);
    }
    rep.points.push_back({nTruncList[a], ground[a * nG + nG / 2], sxy / sxx});
  }
  for (std::size_t a = 1; a < nN; ++a)
    if (!(rep.points[a].groundEnergy < rep.points[a - 1].groundEnergy))
      rep.diagnostics.push_back("ground energy does not decrease from nTrunc=" +
                                std::to_string(rep.points[a - 1].nTrunc) + " to " +
                                std::to_string(rep.points[a].nTrunc));

  // log|slope| = c + x log N
  std::vector<double> lx, ly;
  for (const auto& pt : rep.points) {
    lx.push_back(std::log(double(pt.nTrunc)));
    ly.push_back(std::log(std::abs(pt.slope)));
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / nN;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / nN;
  double sxy = 0, sxx = 0;
  for (std::size_t a = 0; a < nN; ++a) {
    sxy += (lx[a] - mx) * (ly[a] - my);
    sxx += (lx[a] - mx) * (lx[a] - mx);
  }
  rep.exponent = sxy / sxx;
  double rss = 0;
  for (std::size_t a = 0; a < nN; ++a) {
    const double r = ly[a] - (my + rep.exponent * (lx[a] - mx));
    rss += r * r;
  }
  rep.fitResidual = std::sqrt(rss / nN);

  DiagOptions d;
  d.dimCap = 1 << 20;
  const EigenDecomposition ed = diagonalize(build_hamiltonian(p, nTruncList.front()), d);
  const SpinBosonState s = state_from_oracle(ed, 0);
  rep.groundEntropy = entanglement_entropy(reduced_spin_density(s));
  const auto P = photon_number_distribution(s);
  rep.participationRatio = participation_ratio(P);
  for (std::size_t n = 0; n < P.size(); ++n) rep.meanPhoton += n * P[n];
  const int L = std::min<int>(opts.groupLevels, ed.eigenvalues.size());
  for (int i = 0; i < L; ++i) {
    rep.lowLevels.push_back(ed.eigenvalues[i]);
    rep.lowLabels.push_back(ed.parityLabels[i]);
  }
  const int group = parity_class_count(p.kind);
  rep.fourClassGrouping = L >= group;
  for (int start = 0; start + group <= L; start += group) {
    std::set<int> seen(ed.classes.begin() + start, ed.classes.begin() + start + group);
    if (static_cast<int>(seen.size()) != group) rep.fourClassGrouping = false;
  }
  return rep;
}

}  // namespace rabi
