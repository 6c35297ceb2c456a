#pragma once

#include <Eigen/Core>
#include <string>

namespace rabi {

enum class ModelKind { TwoPhoton, TwoMode };
enum class FockParity { Even, Odd };
enum class Branch { Plus, Minus };

struct SectorLabel {
  FockParity fockParity = FockParity::Even;  // two-photon only
  int n0 = 0;                                // two-mode only
  Branch branch = Branch::Plus;
};

struct ModelParams {
  ModelKind kind = ModelKind::TwoPhoton;
  double omega = 1.0;
  double delta = 0.0;
  double g = 0.0;
  double lambda = 0.0;
  SectorLabel sector;
};

// Throws ConfigError when omega <= 0, lambda < 0, a value is not finite or
// n0 is negative.
void validate(const ModelParams& p);

// su(1,1) representation index of the sector: 1/4 or 3/4 (two-photon),
// (n0+1)/2 (two-mode).
double kappa(ModelKind kind, const SectorLabel& s);

// First chain index of the sector: 0 even, 1 odd, 0 two-mode.
int chain_start(ModelKind kind, const SectorLabel& s);

// Distance between consecutive chain indices: 2 (two-photon), 1 (two-mode).
int chain_step(ModelKind kind);

std::string to_string(ModelKind k);
std::string to_string(Branch b);
std::string sector_name(ModelKind kind, const SectorLabel& s);

struct RotationFrames {
  Eigen::Matrix2d W;
  Eigen::Matrix2d U;
  // Maps the rotated-frame spinor back to the original one: Psi = V * Phi.
  Eigen::Matrix2d V;
};

RotationFrames rotation_frames(double beta);

struct RotatedCouplings {
  double p = 0, q = 0, r = 0, s = 0, t = 0;
};

RotatedCouplings rotated_couplings(const ModelParams& params, double beta);

struct BogolubovFrame {
  double u = 1, v = 0;
  double eta = 1;  // zeta for the two-mode model
  double beta = 0;
  double etaPrime = 1;
  double gCritical = 0;
  bool valid = false;
  // Derived once so that downstream code never divides by g.
  double cos2b = 1, sin2b = 0;
  double vOverG = 0;  // smooth at g = 0
};

double critical_coupling(const ModelParams& params);

// Throws ValidityError when |g| >= g_c.
BogolubovFrame bogolubov_frame(const ModelParams& params);

// Same computation, but returns valid = false instead of throwing.
BogolubovFrame try_bogolubov_frame(const ModelParams& params);

}  // namespace rabi
