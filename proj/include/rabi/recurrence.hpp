#pragma once

#include <vector>

#include "rabi/model.hpp"

namespace rabi {

// Per-model pieces of the rotated, Bogolubov-transformed eigen-equation.
// The chain index m runs over start, start+step, ... where step is 2 for the
// two-photon model (Fock parity) and 1 for the two-mode ladder.
class ChainModel {
 public:
  ChainModel(const ModelParams& params, const BogolubovFrame& frame);

  const ModelParams& params() const { return params_; }
  const BogolubovFrame& frame() const { return frame_; }
  const RotatedCouplings& couplings() const { return rc_; }

  int start() const { return start_; }
  int step() const { return step_; }

  double f(int m, double E) const;
  double d(int m) const;
  double h(int m, double E) const;
  // Lowering weight W_m: <m|lowering|m+step> in the unnormalized basis.
  double weight(int m) const;
  // D_{m+step} / D_m = ell(m) * v/u.
  double ell(int m) const;
  double pole(int m) const;
  // log D_start: the first D weight is u^(-1/2), u^(-3/2) or u^(-(n0+1)).
  double logD0() const;

  // sin(2 beta)(1+lambda)/eta; the G-function method needs it nonzero.
  double sigma() const { return sigma_; }
  bool degenerate() const { return !(sigma_ > 0); }

 private:
  double level(int m) const;

  ModelParams params_;
  BogolubovFrame frame_;
  RotatedCouplings rc_;
  int start_ = 0, step_ = 2;
  double offset_ = 0.5, dFactor_ = 2.0;
  double sigma_ = 0;
};

struct ChainCoefficients {
  int m = 0;
  double d = 0, f = 0, a = 0, b = 0, c = 0;
};

// Literal recurrence weights K_{m+} = (b_m K_m + c_m K_{m-}) / a_m.
// Throws NearSingularFError when f_m or f_{m-} is within 1e-10*omega of 0.
ChainCoefficients chain_coefficients(const ModelParams& params,
                                     const BogolubovFrame& frame, double E,
                                     int m);

struct ChainOptions {
  int maxM = 400;
  double tol = 1e-12;
  double epsA = 1e-10;  // in units of omega
  // Multiplies every D_m; used to check that zero sets do not depend on it.
  double dScale = 1.0;
};

// K_m and L_m stored multiplied by D_m, which keeps them finite for every
// coupling including g = 0.
struct CoefficientChain {
  std::vector<int> index;
  std::vector<double> weightedK;
  std::vector<double> weightedL;
  std::vector<double> logAbsD;
  std::vector<int> signD;
  int truncation = 0;
  double tailMagnitude = 0;
  bool converged = false;

  double K(std::size_t i) const;
  double L(std::size_t i) const;
};

// Throws PoleProximityError, NonConvergenceError, DomainError (lambda = 0)
// and ValidityError (|g| >= g_c).
CoefficientChain build_chain(const ModelParams& params, double E,
                             const ChainOptions& opts = {});
CoefficientChain build_chain(const ChainModel& model, double E,
                             const ChainOptions& opts = {});

struct JuddianNumerator {
  // b_m K_m + c_m K_{m-}; vanishes where the pole at index m is removable.
  double value = 0;
  // The same quantity times f_m D_m, which stays finite when f_m = 0.
  double weighted = 0;
  // Sum of the magnitudes of the terms in `weighted`; |weighted| / scale is a
  // relative measure of removability.
  double scale = 0;
};

JuddianNumerator juddian_numerator(const ChainModel& model, double E, int m);

}  // namespace rabi
