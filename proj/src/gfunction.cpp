#include "rabi/gfunction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rabi/errors.hpp"

namespace rabi {

double DWeight::value() const { return sign * std::exp(logAbs); }

DWeight d_coefficient(ModelKind kind, const BogolubovFrame& frame, int m,
                      const SectorLabel& sector) {
  ModelParams p;
  p.kind = kind;
  p.sector = sector;
  ChainModel cm(p, frame);
  if (m < cm.start() || (m - cm.start()) % cm.step() != 0)
    throw DomainError("index " + std::to_string(m) + " is not on the sector");
  DWeight w;
  w.logAbs = cm.logD0();
  const double ratio = std::abs(frame.v / frame.u);
  for (int j = cm.start(); j < m; j += cm.step()) {
    w.logAbs += std::log(cm.ell(j)) + std::log(ratio);
    if (frame.v < 0) w.sign = -w.sign;
  }
  return w;
}

PoleSet pole_energies(const ModelParams& params, int count) {
  const BogolubovFrame fr = bogolubov_frame(params);
  ChainModel cm(params, fr);
  PoleSet ps;
  ps.sector = params.sector;
  ps.etaPrime = fr.etaPrime;
  for (int k = 0; k < count; ++k) {
    const int m = cm.start() + k * cm.step();
    ps.index.push_back(m);
    ps.energies.push_back(cm.pole(m));
  }
  return ps;
}

PoleSet poles_below(const ModelParams& params, double emax) {
  const BogolubovFrame fr = bogolubov_frame(params);
  ChainModel cm(params, fr);
  PoleSet ps;
  ps.sector = params.sector;
  ps.etaPrime = fr.etaPrime;
  for (int m = cm.start();; m += cm.step()) {
    const double e = cm.pole(m);
    if (!ps.energies.empty() && e > emax) break;
    ps.index.push_back(m);
    ps.energies.push_back(e);
    if (ps.energies.size() > 1000000) break;
  }
  return ps;
}

double nearest_pole_distance(const ChainModel& cm, double E) {
  // Pole energies are affine in the chain position j: E_j = e0 + j * de.
  const double e0 = cm.pole(cm.start());
  const double de = cm.pole(cm.start() + cm.step()) - e0;
  if (!(de > 0)) return std::abs(E - e0);
  const double j = std::max(0.0, std::round((E - e0) / de));
  return std::abs(E - cm.pole(cm.start() + static_cast<int>(j) * cm.step()));
}

GSample g_value(const ModelParams& params, double E, const GOptions& opts) {
  return g_value(ChainModel(params, bogolubov_frame(params)), E, opts);
}

namespace {

// Neumaier compensated sum.
struct CompensatedSum {
  double sum = 0, comp = 0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

}  // namespace

GSample g_value(const ChainModel& cm, double E, const GOptions& opts) {
  GSample s;
  s.E = E;
  s.nearestPoleDistance = nearest_pole_distance(cm, E);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (s.nearestPoleDistance < opts.epsPole * cm.params().omega) {
    s.gPlus = s.gMinus = nan;
    return s;
  }
  try {
    const CoefficientChain ch = build_chain(cm, E, opts.chain);
    const double c = std::cos(cm.frame().beta), sn = std::sin(cm.frame().beta);
    CompensatedSum gp, gm;
    for (std::size_t i = 0; i < ch.index.size(); ++i) {
      const double P = ch.weightedK[i], Q = ch.weightedL[i];
      gp.add(-c * Q + sn * P);
      gm.add(sn * Q + c * P);
    }
    s.gPlus = gp.value();
    s.gMinus = gm.value();
    s.converged = true;
    s.truncation = ch.truncation;
    s.tailMagnitude = ch.tailMagnitude;
  } catch (const NonConvergenceError& e) {
    s.gPlus = s.gMinus = nan;
    s.tailMagnitude = e.tailMagnitude();
  } catch (const PoleProximityError&) {
    s.gPlus = s.gMinus = nan;
  }
  return s;
}

}  // namespace rabi
