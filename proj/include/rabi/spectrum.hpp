#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rabi/gfunction.hpp"
#include "rabi/model.hpp"
#include "rabi/parallel.hpp"

namespace rabi {

enum class RootMethod { Bisection, Exceptional };

struct RootRecord {
  double E = 0;
  Branch branch = Branch::Plus;
  SectorLabel sector;
  double lo = 0, hi = 0;  // zero width for exceptional roots
  double residual = 0;
  RootMethod method = RootMethod::Bisection;
};

struct RootOptions {
  int samples = 200;      // per inter-pole interval
  double tol = 1e-10;     // in units of omega
  double dedup = 1e-8;    // in units of omega
  double removable = 1e-8;
  bool oracleCheck = true;
  GOptions g;
};

struct RootSearch {
  std::vector<RootRecord> roots;  // ascending in E
  std::vector<std::string> warnings;

  std::vector<double> energies(Branch b) const;
};

RootSearch find_roots(const ModelParams& params, double emin, double emax,
                      const RootOptions& opts = {});

// Window that holds at least the lowest nLevels levels of each branch.
std::pair<double, double> default_window(const ModelParams& params, int nLevels);

// Oracle parity class whose levels are the zeros of the given branch.
int branch_class(ModelKind kind, const SectorLabel& sector, Branch b);

enum class JuddianKind { Analytic, Numeric };

struct JuddianPoint {
  int m = 0;
  double gStar = 0;
  double EStar = 0;
  JuddianKind kind = JuddianKind::Analytic;
  SectorLabel sector;
};

// Closed forms for the lowest crossings: two-photon index 0 or 1, two-mode
// index 0 in ladder n0.
JuddianPoint juddian_analytic(ModelKind kind, double omega, double delta,
                              double lambda, int index, int n0 = 0);

// Scans g in (gLo, gHi) for zeros of the removable-singularity numerator at
// the pole energy of chain index m, then bisects each to 1e-9.
std::vector<JuddianPoint> juddian_numeric(const ModelParams& family, int m,
                                          double gLo, double gHi, int scan = 400);

struct Crossing {
  double g = 0, E = 0;
  int plusLevel = 0, minusLevel = 0;
  double gLo = 0, gHi = 0;
};

struct SweepPoint {
  double g = 0;
  bool oracleOnly = false;
  std::vector<double> plus, minus;
  std::vector<std::string> warnings;
};

struct SweepResult {
  std::vector<double> gGrid;
  std::vector<SweepPoint> perG;
  std::vector<Crossing> crossings;
};

struct SweepOptions {
  Execution exec = Execution::Parallel;
  RootOptions roots;
  double crossingTol = 1e-7;
  int supercriticalTrunc = 200;
};

SweepResult sweep_spectrum(const ModelParams& family,
                           const std::vector<double>& gGrid, int nLevels,
                           const SweepOptions& opts = {});

double rwa_ground_estimate(int n, const ModelParams& params);

}  // namespace rabi
