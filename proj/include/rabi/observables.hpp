#pragma once

#include <Eigen/Core>
#include <complex>
#include <string>
#include <vector>

#include "rabi/model.hpp"
#include "rabi/oracle.hpp"
#include "rabi/parallel.hpp"

namespace rabi {

enum class StateBasis { BareFock, AlphaFock, PairLadder };

struct SpinBosonState {
  ModelKind kind = ModelKind::TwoPhoton;
  StateBasis basis = StateBasis::BareFock;
  int n0 = 0;
  std::vector<std::complex<double>> up, down;
  bool normalized = false;

  double norm2() const;
  void normalize();
};

struct CrossingOptions {
  int nTrunc = 0;  // 0 picks a cutoff with negligible vacuum tail
  double residualTol = 1e-7;
};

// Parity-resolved eigenstate C*Psi + Pi*Psi at a Juddian point, where
// Psi = U (tan2b |m>>, |m>>). C is +-1 (even, two-mode) or +-i (odd).
// Throws DomainError when params are not at a crossing.
SpinBosonState assemble_crossing_state(const ModelParams& params,
                                       std::complex<double> C,
                                       const CrossingOptions& opts = {});

// ||H psi - E psi|| with the oracle Hamiltonian on the state's cutoff.
double eigen_residual(const ModelParams& params, const SpinBosonState& s, double E);

// Parity operator: -sigma_z i^n (two-photon), -sigma_z (-1)^n (two-mode).
SpinBosonState parity_partner(const SpinBosonState& s);

std::complex<double> overlap(const SpinBosonState& a, const SpinBosonState& b);

SpinBosonState state_from_oracle(const EigenDecomposition& ed, int column);

struct ReducedSpinDensity {
  Eigen::Matrix2cd rho;
};

ReducedSpinDensity reduced_spin_density(const SpinBosonState& s);
double entanglement_entropy(const ReducedSpinDensity& r);
std::vector<double> photon_number_distribution(const SpinBosonState& s);
double participation_ratio(const std::vector<double>& p);

struct EntropyOptions {
  int levels = 1;            // 1: ground, 2: ground and first excited
  bool restrictFock = true;  // two-photon: only the family's Fock parity
  int nTrunc = 0;            // 0: stability-gated choice
  double jumpThreshold = 0.05;
  double refineTol = 1e-6;
  double degeneracyTol = 1e-9;
  Execution exec = Execution::Parallel;
};

struct EntropyRow {
  double g = 0;
  int level = 0;
  double E = 0;
  double S = 0;
  ParityLabel parity = ParityLabel::PlusOne;
  bool ambiguous = false;
};

struct EntropyJump {
  int level = 0;
  double gLo = 0, gHi = 0;
  double SLo = 0, SHi = 0;
  ParityLabel parityLo = ParityLabel::PlusOne, parityHi = ParityLabel::PlusOne;
};

struct EntropyTable {
  std::vector<EntropyRow> rows;
  std::vector<EntropyJump> jumps;
  int nTrunc = 0;
};

EntropyTable entropy_sweep(const ModelParams& family, const std::vector<double>& gGrid,
                           const EntropyOptions& opts = {});

struct CondensationRow {
  double g = 0;
  double eta = 0;
  double etaPrime = 0;
  std::vector<double> poles;
  double oracleSpread = 0;  // E_k - E_0 over all parity classes
};

struct CondensationOptions {
  int k = 5;
  Execution exec = Execution::Parallel;
};

std::vector<CondensationRow> condensation_scan(const ModelParams& family,
                                               const std::vector<double>& gGrid,
                                               const CondensationOptions& opts = {});

struct SupercriticalPoint {
  int nTrunc = 0;
  double groundEnergy = 0;
  double slope = 0;
};

struct SupercriticalReport {
  double g = 0;
  std::vector<SupercriticalPoint> points;
  double exponent = 0;
  double fitResidual = 0;
  // Ground state at the first cutoff.
  double groundEntropy = 0;
  double participationRatio = 0;
  double meanPhoton = 0;
  std::vector<double> lowLevels;
  std::vector<ParityLabel> lowLabels;
  bool fourClassGrouping = false;
  std::vector<std::string> diagnostics;
};

struct SupercriticalOptions {
  double halfWidth = 0.01;
  int points = 5;
  int groupLevels = 12;
  Execution exec = Execution::Parallel;
};

SupercriticalReport supercritical_scan(const ModelParams& family, double g,
                                       const std::vector<int>& nTruncList,
                                       const SupercriticalOptions& opts = {});

}  // namespace rabi
