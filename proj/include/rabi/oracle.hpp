#pragma once

#include <Eigen/Core>
#include <complex>
#include <string>
#include <vector>

#include "rabi/model.hpp"

namespace rabi {

enum class ParityLabel { PlusOne, PlusI, MinusOne, MinusI };

std::string to_string(ParityLabel p);

// Spin index 0 is up, 1 is down; basis index is 2n + spin.
constexpr int kUp = 0;
constexpr int kDown = 1;

// Conserved integer class: (n + 2[up]) mod 4 (two-photon) or (n + [up]) mod 2
// (two-mode, n the ladder index n2).
int parity_class(ModelKind kind, int n, int spin);
int parity_class_count(ModelKind kind);
ParityLabel parity_label(ModelKind kind, int cls);
std::complex<double> parity_value(ModelKind kind, int cls);

struct TruncatedHamiltonian {
  ModelKind kind = ModelKind::TwoPhoton;
  int nTrunc = 0;
  int n0 = 0;
  int dim = 0;
  Eigen::MatrixXd entries;

  static int index(int n, int spin) { return 2 * n + spin; }
};

TruncatedHamiltonian build_hamiltonian(const ModelParams& params, int nTrunc);

struct ParityOperator {
  ModelKind kind = ModelKind::TwoPhoton;
  std::vector<int> classes;  // per basis index
};

ParityOperator parity_matrix(const ModelParams& params, int nTrunc);

struct EigenDecomposition {
  ModelKind kind = ModelKind::TwoPhoton;
  int nTrunc = 0;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;  // empty when vectors were not requested
  std::vector<int> classes;
  std::vector<ParityLabel> parityLabels;

  std::vector<double> class_levels(int cls) const;
};

struct DiagOptions {
  int dimCap = 4096;
  bool vectors = true;
};

EigenDecomposition diagonalize(const TruncatedHamiltonian& H,
                               const DiagOptions& opts = {});

struct StabilityOptions {
  int nStart = 60;
  double tol = 1e-8;
  int nMax = 2000;
  bool vectors = false;
};

struct StableSpectrum {
  EigenDecomposition decomposition;
  int nTrunc = 0;        // truncation of the returned decomposition
  int certifiedAt = 0;   // smaller truncation that passed the 1.5x gate
  double maxShift = 0;   // largest shift of a compared level between the two
  bool stable = false;
};

// Grows the cutoff until the lowest `levelsPerClass` levels of every parity
// class move by less than tol under nTrunc -> 1.5 nTrunc.
StableSpectrum stable_spectrum(const ModelParams& params, int levelsPerClass,
                               const StabilityOptions& opts = {});

struct ConjugationReport {
  double maxDeviation = 0;
  std::string worstClass;
  std::vector<std::pair<std::string, double>> classes;
};

// Compares U^T H U built from truncated matrices with the closed forms of the
// rotated and Bogolubov-transformed Hamiltonians, and checks that the
// recurrence solves the transformed eigen-equation row by row. Throws
// NumericError naming the offending class when a deviation exceeds
// 1e-8 * omega.
ConjugationReport bogolubov_conjugation_check(const ModelParams& params,
                                              int nTrunc);

// Relative residual of the coefficient chain at energy E inserted into the
// transformed Hamiltonian, whose alpha-basis elements are computed
// numerically. Rows up to `rows` chain steps are checked.
double chain_residual(const ModelParams& params, double E, int rows);

// Probability mass of the squeezed vacuum beyond the cutoff: bare Fock
// index nTrunc (two-photon) or ladder index nTrunc (two-mode).
double vacuum_tail_mass(ModelKind kind, const BogolubovFrame& frame, int n0,
                        int nTrunc);

// Normalized alpha vacuum over bare Fock states 0..nTrunc. Throws
// NumericError when the discarded tail mass exceeds 1e-10.
std::vector<double> vacuum_state_alpha(const BogolubovFrame& frame, int nTrunc);

// (u a^dag + v a)^m applied to the alpha vacuum, unnormalized.
std::vector<double> alpha_fock(const BogolubovFrame& frame, int m, int nTrunc);

// Normalized two-mode squeezed vacuum |n0,0>_b over the |n0+n, n> ladder.
std::vector<double> two_mode_vacuum(const BogolubovFrame& frame, int n0,
                                    int nTrunc);

}  // namespace rabi
