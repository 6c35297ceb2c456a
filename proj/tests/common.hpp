#pragma once

#include "rabi/model.hpp"

namespace testing {

inline rabi::ModelParams two_photon(double g, rabi::FockParity parity = rabi::FockParity::Even,
                                    double lambda = 0.25, double delta = 0.2) {
  rabi::ModelParams p;
  p.kind = rabi::ModelKind::TwoPhoton;
  p.omega = 1;
  p.delta = delta;
  p.g = g;
  p.lambda = lambda;
  p.sector.fockParity = parity;
  return p;
}

inline rabi::ModelParams two_mode(double g, int n0 = 0, double lambda = 0.5,
                                  double delta = 0.2) {
  rabi::ModelParams p;
  p.kind = rabi::ModelKind::TwoMode;
  p.omega = 1;
  p.delta = delta;
  p.g = g;
  p.lambda = lambda;
  p.sector.n0 = n0;
  return p;
}

}  // namespace testing
