#pragma once

#include <vector>

#include "rabi/model.hpp"
#include "rabi/recurrence.hpp"

namespace rabi {

// D_m kept as log-magnitude and sign; value() may under- or overflow.
struct DWeight {
  double logAbs = 0;
  int sign = 1;
  double value() const;
};

DWeight d_coefficient(ModelKind kind, const BogolubovFrame& frame, int m,
                      const SectorLabel& sector);

struct PoleSet {
  SectorLabel sector;
  std::vector<int> index;
  std::vector<double> energies;
  double etaPrime = 1;
};

PoleSet pole_energies(const ModelParams& params, int count);

// All poles of the sector at or below emax (at least one).
PoleSet poles_below(const ModelParams& params, double emax);

struct GOptions {
  double epsPole = 1e-6;  // in units of omega
  ChainOptions chain;
};

struct GSample {
  double E = 0;
  double gPlus = 0;
  double gMinus = 0;
  double nearestPoleDistance = 0;
  bool converged = false;
  int truncation = 0;
  double tailMagnitude = 0;

  double branch(Branch b) const { return b == Branch::Plus ? gPlus : gMinus; }
};

double nearest_pole_distance(const ChainModel& model, double E);

GSample g_value(const ModelParams& params, double E, const GOptions& opts = {});
GSample g_value(const ChainModel& model, double E, const GOptions& opts = {});

}  // namespace rabi
