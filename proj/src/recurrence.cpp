#include "rabi/recurrence.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "rabi/errors.hpp"

namespace rabi {

ChainModel::ChainModel(const ModelParams& params, const BogolubovFrame& frame)
    : params_(params), frame_(frame) {
  rc_ = rotated_couplings(params, frame.beta);
  // Use the frame's cos/sin so p, q, r agree with it to the last bit.
  rc_.p = params.delta * frame.cos2b;
  rc_.q = params.delta * frame.sin2b;
  rc_.r = 0.5 * frame.sin2b * (1 + params.lambda) * params.g;
  start_ = chain_start(params.kind, params.sector);
  step_ = chain_step(params.kind);
  if (params.kind == ModelKind::TwoPhoton) {
    offset_ = 0.5 * params.omega;
    dFactor_ = 2.0;
  } else {
    offset_ = params.omega;
    dFactor_ = 0.5;
  }
  sigma_ = frame.sin2b * (1 + params.lambda) / frame.eta;
}

double ChainModel::level(int m) const {
  if (params_.kind == ModelKind::TwoPhoton) return m + 0.5;
  return params_.sector.n0 + 1 + 2.0 * m;
}

double ChainModel::f(int m, double E) const {
  return params_.omega * frame_.eta * level(m) - offset_ + rc_.p - E;
}

double ChainModel::d(int m) const {
  const double lam = params_.lambda;
  return rc_.q + rc_.r * (1 - lam) * (params_.g / params_.omega) * dFactor_ * level(m);
}

double ChainModel::h(int m, double E) const {
  const double eta = frame_.eta;
  return params_.omega * (2 / eta - eta) * level(m) - offset_ - rc_.p - E;
}

double ChainModel::weight(int m) const {
  if (params_.kind == ModelKind::TwoPhoton) return double(m + 2) * (m + 1);
  return double(m + 1) * (params_.sector.n0 + m + 1);
}

double ChainModel::ell(int m) const {
  if (params_.kind == ModelKind::TwoPhoton) return m % 2 == 0 ? m + 1.0 : m + 2.0;
  return params_.sector.n0 + m + 1.0;
}

double ChainModel::pole(int m) const {
  return params_.omega * frame_.etaPrime * level(m) - offset_;
}

double ChainModel::logD0() const {
  const double lu = std::log(frame_.u);
  if (params_.kind == ModelKind::TwoMode) return -(params_.sector.n0 + 1) * lu;
  return start_ == 0 ? -0.5 * lu : -1.5 * lu;
}

ChainCoefficients chain_coefficients(const ModelParams& params,
                                     const BogolubovFrame& frame, double E,
                                     int m) {
  ChainModel cm(params, frame);
  if (m < cm.start() || (m - cm.start()) % cm.step() != 0)
    throw DomainError("chain index " + std::to_string(m) +
                      " is not on the sector");
  const double epsF = 1e-10 * params.omega;
  const double g = params.g, lam = params.lambda, eta = frame.eta;
  const double r = cm.couplings().r;
  const int prev = m - cm.step();

  ChainCoefficients c;
  c.m = m;
  c.d = cm.d(m);
  c.f = cm.f(m, E);
  if (std::abs(c.f) < epsF)
    throw NearSingularFError("f_" + std::to_string(m) + " vanishes at E");
  const double h = cm.h(m, E);
  c.a = (-c.d * (1 - lam) * g / c.f + 2 * r / eta) * cm.weight(m);
  c.b = -c.d * c.d / c.f + h;
  c.c = 0;
  if (prev >= cm.start()) {
    const double fp = cm.f(prev, E);
    if (std::abs(fp) < epsF)
      throw NearSingularFError("f_" + std::to_string(prev) + " vanishes at E");
    c.b -= (1 - lam) * (1 - lam) * cm.weight(prev) * g * g / fp;
    c.c = (1 - lam) * g * cm.d(prev) / fp - 2 * r / eta;
  }
  return c;
}

double CoefficientChain::K(std::size_t i) const {
  if (weightedK[i] == 0) return 0;
  const double mag = std::log(std::abs(weightedK[i])) - logAbsD[i];
  return std::copysign(std::exp(mag), weightedK[i]) * signD[i];
}

double CoefficientChain::L(std::size_t i) const {
  if (weightedL[i] == 0) return 0;
  const double mag = std::log(std::abs(weightedL[i])) - logAbsD[i];
  return std::copysign(std::exp(mag), weightedL[i]) * signD[i];
}

namespace {

// Advances the D-weighted pair one chain step. With P = K D, Q = L D and
// S = g K_{m+} D_m, the definition of L_m and the second eigen-equation row
// form a 2x2 system in (Q_m, S_m):
//   f Q + (1-lam) W S = d P
//   d Q + sigma W S   = h P + g^2 ell_{m-} (nu/u) [(1-lam) Q_{m-} - sigma P_{m-}]
// Its determinant is sigma W (E_pole - E), so it fails only at poles.
struct ChainStepper {
  const ChainModel& cm;
  double E;
  double nuOverU;
  double P, Pprev = 0, Qprev = 0;
  int m;
  bool first = true;

  ChainStepper(const ChainModel& model, double energy, double scale)
      : cm(model), E(energy), m(model.start()) {
    const auto& fr = model.frame();
    nuOverU = fr.vOverG / fr.u;
    P = scale * std::exp(model.logD0());
  }

  double rhs2() const {
    if (first) return cm.h(m, E) * P;
    const double g = cm.params().g, lam = cm.params().lambda;
    const int prev = m - cm.step();
    return cm.h(m, E) * P + g * g * cm.ell(prev) * nuOverU *
                                ((1 - lam) * Qprev - cm.sigma() * Pprev);
  }

  // Denominator sigma f - (1-lam) d, equal to sigma (E_pole - E).
  double det() const {
    return cm.sigma() * cm.f(m, E) - (1 - cm.params().lambda) * cm.d(m);
  }

  // Cramer numerator of S_m; f_m D_m N_m.
  double numerator() const {
    return cm.f(m, E) * rhs2() - cm.d(m) * cm.d(m) * P;
  }

  double numerator_scale() const {
    const double f = cm.f(m, E);
    return std::abs(f * cm.h(m, E) * P) + std::abs(f * (rhs2() - cm.h(m, E) * P)) +
           std::abs(cm.d(m) * cm.d(m) * P);
  }

  // Returns Q_m and moves to m + step.
  double advance() {
    const double lam = cm.params().lambda;
    const double f = cm.f(m, E), d = cm.d(m), sig = cm.sigma();
    const double r1 = d * P, r2 = rhs2();
    const double dt = det();
    const double Q = (sig * r1 - (1 - lam) * r2) / dt;
    const double S = (f * r2 - d * r1) / (dt * cm.weight(m));
    const double Pnext = cm.ell(m) * nuOverU * S;
    Pprev = P;
    Qprev = Q;
    P = Pnext;
    m += cm.step();
    first = false;
    return Q;
  }
};

void require_nondegenerate(const ChainModel& cm) {
  if (cm.degenerate())
    throw DomainError(
        "the G-function method degenerates at lambda = 0 (rotating-wave "
        "coupling only); use the oracle spectrum instead");
}

}  // namespace

CoefficientChain build_chain(const ModelParams& params, double E,
                             const ChainOptions& opts) {
  return build_chain(ChainModel(params, bogolubov_frame(params)), E, opts);
}

CoefficientChain build_chain(const ChainModel& cm, double E,
                             const ChainOptions& opts) {
  require_nondegenerate(cm);
  const auto& fr = cm.frame();
  const double omega = cm.params().omega;
  const double logRatio = std::log(std::abs(fr.v / fr.u));
  const int vSign = fr.v < 0 ? -1 : 1;

  CoefficientChain ch;
  ChainStepper st(cm, E, opts.dScale);
  double logD = cm.logD0() + std::log(opts.dScale);
  int sign = 1;
  double absSum = 0;
  int quiet = 0;
  for (int k = 0; k < opts.maxM; ++k) {
    const int m = st.m;
    if (std::abs(st.det()) < opts.epsA * omega * cm.sigma())
      throw PoleProximityError("energy " + std::to_string(E) +
                                   " is within tolerance of pole index " +
                                   std::to_string(m),
                               m);
    const double P = st.P;
    const double Q = st.advance();
    ch.index.push_back(m);
    ch.weightedK.push_back(P);
    ch.weightedL.push_back(Q);
    ch.logAbsD.push_back(logD);
    ch.signD.push_back(sign);
    logD += std::log(cm.ell(m)) + logRatio;
    sign *= vSign;

    const double term = std::abs(P) + std::abs(Q);
    absSum += term;
    ch.tailMagnitude = term;
    quiet = term < opts.tol * absSum ? quiet + 1 : 0;
    if (quiet >= 4) {
      ch.converged = true;
      break;
    }
  }
  ch.truncation = static_cast<int>(ch.index.size());
  if (!ch.converged)
    throw NonConvergenceError("coefficient chain did not converge within " +
                                  std::to_string(opts.maxM) + " steps",
                              ch.tailMagnitude);
  return ch;
}

JuddianNumerator juddian_numerator(const ChainModel& cm, double E, int m) {
  require_nondegenerate(cm);
  if (m < cm.start() || (m - cm.start()) % cm.step() != 0)
    throw DomainError("chain index " + std::to_string(m) +
                      " is not on the sector");
  ChainStepper st(cm, E, 1.0);
  double logD = cm.logD0();
  const auto& fr = cm.frame();
  const double logRatio = std::log(std::abs(fr.v / fr.u));
  int sign = 1;
  while (st.m < m) {
    logD += std::log(cm.ell(st.m)) + logRatio;
    if (fr.v < 0) sign = -sign;
    st.advance();
  }
  JuddianNumerator out;
  out.weighted = st.numerator();
  out.scale = st.numerator_scale();
  const double f = cm.f(m, E);
  out.value = out.weighted / (f * std::exp(logD)) * sign;
  return out;
}

}  // namespace rabi
