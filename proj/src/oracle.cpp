#include "rabi/oracle.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "rabi/errors.hpp"
#include "rabi/recurrence.hpp"

namespace rabi {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Sparse = Eigen::SparseMatrix<double>;

std::string to_string(ParityLabel p) {
  switch (p) {
    case ParityLabel::PlusOne: return "+1";
    case ParityLabel::PlusI: return "+i";
    case ParityLabel::MinusOne: return "-1";
    case ParityLabel::MinusI: return "-i";
  }
  return "?";
}

int parity_class(ModelKind kind, int n, int spin) {
  if (kind == ModelKind::TwoPhoton) return (n + (spin == kUp ? 2 : 0)) % 4;
  return (n + (spin == kUp ? 1 : 0)) % 2;
}

int parity_class_count(ModelKind kind) {
  return kind == ModelKind::TwoPhoton ? 4 : 2;
}

ParityLabel parity_label(ModelKind kind, int cls) {
  if (kind == ModelKind::TwoMode)
    return cls == 0 ? ParityLabel::PlusOne : ParityLabel::MinusOne;
  static const ParityLabel labels[] = {ParityLabel::PlusOne, ParityLabel::PlusI,
                                       ParityLabel::MinusOne,
                                       ParityLabel::MinusI};
  return labels[cls];
}

std::complex<double> parity_value(ModelKind kind, int cls) {
  switch (parity_label(kind, cls)) {
    case ParityLabel::PlusOne: return {1, 0};
    case ParityLabel::PlusI: return {0, 1};
    case ParityLabel::MinusOne: return {-1, 0};
    case ParityLabel::MinusI: return {0, -1};
  }
  return {0, 0};
}

TruncatedHamiltonian build_hamiltonian(const ModelParams& params, int nTrunc) {
  validate(params);
  if (nTrunc < 4) throw ConfigError("nTrunc must be at least 4");
  TruncatedHamiltonian H;
  H.kind = params.kind;
  H.nTrunc = nTrunc;
  H.n0 = params.sector.n0;
  H.dim = 2 * (nTrunc + 1);
  H.entries = MatrixXd::Zero(H.dim, H.dim);
  const double w = params.omega, D = params.delta, g = params.g,
               lam = params.lambda;
  const int n0 = params.sector.n0;
  const bool tp = params.kind == ModelKind::TwoPhoton;
  const int hop = tp ? 2 : 1;
  for (int n = 0; n <= nTrunc; ++n) {
    const double bosons = tp ? w * n : w * (n0 + 2.0 * n);
    H.entries(H.index(n, kUp), H.index(n, kUp)) = bosons + D;
    H.entries(H.index(n, kDown), H.index(n, kDown)) = bosons - D;
    const int m = n + hop;
    if (m > nTrunc) continue;
    // <n|lowering|m> for a^2 or a1 a2.
    const double low = tp ? std::sqrt(double(m) * (m - 1))
                          : std::sqrt(double(m) * (n0 + m));
    // up,n <- down,m through g * lowering; down,n <- up,m through lambda g.
    H.entries(H.index(n, kUp), H.index(m, kDown)) = g * low;
    H.entries(H.index(m, kDown), H.index(n, kUp)) = g * low;
    H.entries(H.index(n, kDown), H.index(m, kUp)) = lam * g * low;
    H.entries(H.index(m, kUp), H.index(n, kDown)) = lam * g * low;
  }
  return H;
}

ParityOperator parity_matrix(const ModelParams& params, int nTrunc) {
  ParityOperator P;
  P.kind = params.kind;
  for (int n = 0; n <= nTrunc; ++n) {
    P.classes.push_back(parity_class(params.kind, n, kUp));
    P.classes.push_back(parity_class(params.kind, n, kDown));
  }
  return P;
}

std::vector<double> EigenDecomposition::class_levels(int cls) const {
  std::vector<double> out;
  for (int i = 0; i < eigenvalues.size(); ++i)
    if (classes[i] == cls) out.push_back(eigenvalues[i]);
  return out;
}

namespace {

bool is_tridiagonal(const MatrixXd& B) {
  for (int j = 0; j < B.cols(); ++j)
    for (int i = j + 2; i < B.rows(); ++i)
      if (B(i, j) != 0 || B(j, i) != 0) return false;
  return true;
}

}  // namespace

EigenDecomposition diagonalize(const TruncatedHamiltonian& H,
                               const DiagOptions& opts) {
  if (H.dim > opts.dimCap)
    throw ConfigError("matrix dimension " + std::to_string(H.dim) +
                      " exceeds the cap " + std::to_string(opts.dimCap));
  const int nClass = parity_class_count(H.kind);
  std::vector<std::vector<int>> members(nClass);
  for (int n = 0; n <= H.nTrunc; ++n)
    for (int s : {kUp, kDown})
      members[parity_class(H.kind, n, s)].push_back(H.index(n, s));

  struct Level {
    double E;
    int cls;
    int block;
    int col;
  };
  std::vector<Level> levels;
  std::vector<MatrixXd> vecs(nClass);
  const int mode = opts.vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly;
  for (int c = 0; c < nClass; ++c) {
    const auto& idx = members[c];
    const int k = static_cast<int>(idx.size());
    if (k == 0) continue;
    MatrixXd B(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) B(i, j) = H.entries(idx[i], idx[j]);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es;
    if (is_tridiagonal(B)) {
      VectorXd diag = B.diagonal();
      VectorXd sub = k > 1 ? VectorXd(B.diagonal(-1)) : VectorXd();
      es.computeFromTridiagonal(diag, sub, mode);
    } else {
      es.compute(B, mode);
    }
    if (es.info() != Eigen::Success)
      throw NumericError("eigensolver failed on parity block " +
                         std::to_string(c) + " of size " + std::to_string(k));
    for (int i = 0; i < k; ++i) levels.push_back({es.eigenvalues()[i], c, c, i});
    if (opts.vectors) vecs[c] = es.eigenvectors();
  }
  std::stable_sort(levels.begin(), levels.end(), [](const Level& a, const Level& b) {
    return a.E < b.E || (a.E == b.E && a.cls < b.cls);
  });

  EigenDecomposition out;
  out.kind = H.kind;
  out.nTrunc = H.nTrunc;
  out.eigenvalues.resize(H.dim);
  if (opts.vectors) out.eigenvectors = MatrixXd::Zero(H.dim, H.dim);
  for (int i = 0; i < H.dim; ++i) {
    const Level& L = levels[i];
    out.eigenvalues[i] = L.E;
    out.classes.push_back(L.cls);
    out.parityLabels.push_back(parity_label(H.kind, L.cls));
    if (opts.vectors) {
      const auto& idx = members[L.block];
      for (std::size_t r = 0; r < idx.size(); ++r)
        out.eigenvectors(idx[r], i) = vecs[L.block](r, L.col);
    }
  }
  return out;
}

StableSpectrum stable_spectrum(const ModelParams& params, int levelsPerClass,
                               const StabilityOptions& opts) {
  DiagOptions dOpts;
  dOpts.vectors = false;
  dOpts.dimCap = 2 * (static_cast<int>(1.5 * opts.nMax) + 2);
  int n = std::max(opts.nStart, 4);
  const int nClass = parity_class_count(params.kind);
  EigenDecomposition lo = diagonalize(build_hamiltonian(params, n), dOpts);
  StableSpectrum out;
  while (true) {
    const int n2 = static_cast<int>(std::ceil(1.5 * n));
    EigenDecomposition hi = diagonalize(build_hamiltonian(params, n2), dOpts);
    double shift = 0;
    for (int c = 0; c < nClass; ++c) {
      const auto a = lo.class_levels(c), b = hi.class_levels(c);
      const std::size_t k = std::min<std::size_t>(levelsPerClass, std::min(a.size(), b.size()));
      for (std::size_t i = 0; i < k; ++i) shift = std::max(shift, std::abs(a[i] - b[i]));
    }
    out.maxShift = shift;
    out.certifiedAt = n;
    if (shift < opts.tol || n2 > opts.nMax) {
      out.stable = shift < opts.tol;
      out.nTrunc = n2;
      if (opts.vectors) {
        DiagOptions v = dOpts;
        v.vectors = true;
        out.decomposition = diagonalize(build_hamiltonian(params, n2), v);
      } else {
        out.decomposition = std::move(hi);
      }
      return out;
    }
    n = n2;
    lo = std::move(hi);
  }
}

namespace {

struct Blocks {
  MatrixXd b11, b12, b21, b22;
};

// U^T H U for U = [[c,-s],[s,c]], blockwise.
template <class M>
void rotate(const M& h11, const M& h12, const M& h21, const M& h22, double c,
            double s, M& r11, M& r12, M& r21, M& r22) {
  r11 = c * c * h11 + c * s * (h12 + h21) + s * s * h22;
  r12 = -c * s * h11 + c * c * h12 - s * s * h21 + c * s * h22;
  r21 = -c * s * h11 + c * c * h21 - s * s * h12 + c * s * h22;
  r22 = s * s * h11 - c * s * (h12 + h21) + c * c * h22;
}

MatrixXd lowering(int nb) {
  MatrixXd a = MatrixXd::Zero(nb, nb);
  for (int n = 1; n < nb; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

double max_dev(const MatrixXd& A, const MatrixXd& B, int k) {
  return (A.topLeftCorner(k, k) - B.topLeftCorner(k, k)).cwiseAbs().maxCoeff();
}

struct TwoPhotonOps {
  MatrixXd r11, r12, r21, r22;  // rotated bare blocks
  MatrixXd a;
};

TwoPhotonOps two_photon_rotated(const ModelParams& p, const BogolubovFrame& fr,
                                int nb) {
  TwoPhotonOps o;
  o.a = lowering(nb);
  const MatrixXd ad = o.a.transpose();
  const MatrixXd N = ad * o.a;
  const MatrixXd I = MatrixXd::Identity(nb, nb);
  const MatrixXd X = p.g * (o.a * o.a + p.lambda * ad * ad);
  const MatrixXd h11 = p.omega * N + p.delta * I;
  const MatrixXd h22 = p.omega * N - p.delta * I;
  const MatrixXd Xt = X.transpose();
  rotate<MatrixXd>(h11, X, Xt, h22, std::cos(fr.beta), std::sin(fr.beta), o.r11,
                   o.r12, o.r21, o.r22);
  return o;
}

// Full two-mode Fock space with n1, n2 <= nmax, index n1 * (nmax+1) + n2.
struct TwoModeSpace {
  int nmax;
  Sparse a1, a2;
  explicit TwoModeSpace(int nmax_) : nmax(nmax_) {
    const int M = nmax + 1, dim = M * M;
    std::vector<Eigen::Triplet<double>> t1, t2;
    for (int n1 = 0; n1 <= nmax; ++n1)
      for (int n2 = 0; n2 <= nmax; ++n2) {
        if (n1 > 0) t1.emplace_back(idx(n1 - 1, n2), idx(n1, n2), std::sqrt(double(n1)));
        if (n2 > 0) t2.emplace_back(idx(n1, n2 - 1), idx(n1, n2), std::sqrt(double(n2)));
      }
    a1.resize(dim, dim);
    a2.resize(dim, dim);
    a1.setFromTriplets(t1.begin(), t1.end());
    a2.setFromTriplets(t2.begin(), t2.end());
  }
  int idx(int n1, int n2) const { return n1 * (nmax + 1) + n2; }
  int dim() const { return (nmax + 1) * (nmax + 1); }

  // Dense restriction onto the ladder |n0+n, n>, n < len.
  MatrixXd ladder(const Sparse& op, int n0, int len) const {
    std::vector<int> pos(dim(), -1);
    for (int n = 0; n < len; ++n) pos[idx(n0 + n, n)] = n;
    MatrixXd out = MatrixXd::Zero(len, len);
    for (int k = 0; k < op.outerSize(); ++k)
      for (Sparse::InnerIterator it(op, k); it; ++it) {
        const int r = pos[it.row()], c = pos[it.col()];
        if (r >= 0 && c >= 0) out(r, c) = it.value();
      }
    return out;
  }
};

Sparse sparse_identity(int dim) {
  Sparse I(dim, dim);
  I.setIdentity();
  return I;
}

struct TwoModeRotated {
  Sparse r11, r12, r21, r22;
};

TwoModeRotated two_mode_rotated(const ModelParams& p, const BogolubovFrame& fr,
                                const TwoModeSpace& sp) {
  const Sparse I = sparse_identity(sp.dim());
  const Sparse a1t = sp.a1.transpose(), a2t = sp.a2.transpose();
  const Sparse N = Sparse(a1t * sp.a1) + Sparse(a2t * sp.a2);
  const Sparse Km = sp.a1 * sp.a2;
  const Sparse Kp = Km.transpose();
  const Sparse X = p.g * (Km + p.lambda * Kp);
  const Sparse Xt = X.transpose();
  const Sparse h11 = p.omega * N + p.delta * I;
  const Sparse h22 = p.omega * N - p.delta * I;
  TwoModeRotated o;
  rotate<Sparse>(h11, X, Xt, h22, std::cos(fr.beta), std::sin(fr.beta), o.r11,
                 o.r12, o.r21, o.r22);
  return o;
}

void record(ConjugationReport& rep, const std::string& name, double dev) {
  rep.classes.emplace_back(name, dev);
  if (rep.worstClass.empty() || dev > rep.maxDeviation) {
    rep.maxDeviation = dev;
    rep.worstClass = name;
  }
}

void check_two_photon(const ModelParams& p, const BogolubovFrame& fr, int nTrunc,
                      ConjugationReport& rep) {
  const int nb = nTrunc + 1, k = nTrunc - 4;
  const TwoPhotonOps o = two_photon_rotated(p, fr, nb);
  const MatrixXd& a = o.a;
  const MatrixXd ad = a.transpose();
  const MatrixXd I = MatrixXd::Identity(nb, nb);
  const MatrixXd N = ad * a;
  const RotatedCouplings rc = rotated_couplings(p, fr.beta);
  const double w = p.omega, g = p.g, lam = p.lambda;

  const MatrixXd sq = a * a + ad * ad;
  record(rep, "rotated-11", max_dev(o.r11, w * N + rc.p * I + rc.r * sq, k));
  record(rep, "rotated-12", max_dev(o.r12, -rc.q * I + rc.s * a * a + rc.t * ad * ad, k));
  record(rep, "rotated-21", max_dev(o.r21, -rc.q * I + rc.t * a * a + rc.s * ad * ad, k));
  record(rep, "rotated-22", max_dev(o.r22, w * N - rc.p * I - rc.r * sq, k));

  const double eta = fr.eta;
  const MatrixXd al = fr.u * a + fr.v * ad;
  const MatrixXd alt = al.transpose();
  const MatrixXd Na = alt * al, al2 = al * al, ad2 = alt * alt;
  const MatrixXd half = Na + 0.5 * I;
  const MatrixXd mid = -rc.q * I - rc.r * (1 - lam) * (g / w) * (2 * Na + I);
  record(rep, "transformed-11", max_dev(o.r11, w * eta * half - 0.5 * w * I + rc.p * I, k));
  record(rep, "transformed-12", max_dev(o.r12, mid + (1 - lam) * g * al2, k));
  record(rep, "transformed-21", max_dev(o.r21, mid + (1 - lam) * g * ad2, k));
  record(rep, "transformed-22",
         max_dev(o.r22,
                 w * (2 / eta - eta) * half - 0.5 * w * I - rc.p * I -
                     (2 * rc.r / eta) * (ad2 + al2),
                 k));
}

void check_two_mode(const ModelParams& p, const BogolubovFrame& fr, int nTrunc,
                    ConjugationReport& rep) {
  const int n0 = p.sector.n0, k = nTrunc - 4;
  const TwoModeSpace sp(n0 + nTrunc + 4);
  const TwoModeRotated o = two_mode_rotated(p, fr, sp);
  const Sparse I = sparse_identity(sp.dim());
  const Sparse a1t = sp.a1.transpose(), a2t = sp.a2.transpose();
  const Sparse N = Sparse(a1t * sp.a1) + Sparse(a2t * sp.a2);
  const Sparse Km = sp.a1 * sp.a2;
  const Sparse Kp = Km.transpose();
  const RotatedCouplings rc = rotated_couplings(p, fr.beta);
  const double w = p.omega, g = p.g, lam = p.lambda;
  auto L = [&](const Sparse& m) { return sp.ladder(m, n0, k); };

  record(rep, "rotated-11", max_dev(L(o.r11), L(w * N + rc.p * I + rc.r * (Kp + Km)), k));
  record(rep, "rotated-12", max_dev(L(o.r12), L(-rc.q * I + rc.s * Km + rc.t * Kp), k));
  record(rep, "rotated-21", max_dev(L(o.r21), L(-rc.q * I + rc.t * Km + rc.s * Kp), k));
  record(rep, "rotated-22", max_dev(L(o.r22), L(w * N - rc.p * I - rc.r * (Kp + Km)), k));

  const double zeta = fr.eta;
  const Sparse b1 = fr.u * sp.a1 + fr.v * a2t;
  const Sparse b2 = fr.u * sp.a2 + fr.v * a1t;
  const Sparse b1t = b1.transpose(), b2t = b2.transpose();
  const Sparse Nb = Sparse(b1t * b1) + Sparse(b2t * b2) + I;
  const Sparse Bm = b1 * b2;
  const Sparse Bp = b1t * b2t;
  const Sparse mid = -rc.q * I - (rc.r * (1 - lam) * (g / w) / 2) * Nb;
  record(rep, "transformed-11", max_dev(L(o.r11), L(w * zeta * Nb - w * I + rc.p * I), k));
  record(rep, "transformed-12", max_dev(L(o.r12), L(mid + (1 - lam) * g * Bm), k));
  record(rep, "transformed-21", max_dev(L(o.r21), L(mid + (1 - lam) * g * Bp), k));
  record(rep, "transformed-22",
         max_dev(L(o.r22),
                 L(w * (2 / zeta - zeta) * Nb - w * I - rc.p * I -
                   (2 * rc.r / zeta) * (Bp + Bm)),
                 k));
}

// Exact amplitude ratio c_{j+1}/c_j of the squeezed vacua, in steps of the
// representation index j (bare n = 2j for two-photon, ladder n for two-mode).
double vacuum_ratio(ModelKind kind, const BogolubovFrame& fr, int n0, int j) {
  const double x = -fr.v / fr.u;
  if (kind == ModelKind::TwoPhoton) return x * std::sqrt((2.0 * j + 1) / (2.0 * j + 2));
  return x * std::sqrt((n0 + j + 1.0) / (j + 1.0));
}

double vacuum_c0(ModelKind kind, const BogolubovFrame& fr, int n0) {
  if (kind == ModelKind::TwoPhoton) return 1 / std::sqrt(fr.u);
  return std::pow(fr.u, -(n0 + 1.0));
}

// Amplitudes over representation indices 0..len-1 and the exact tail mass.
std::vector<double> vacuum_amplitudes(ModelKind kind, const BogolubovFrame& fr,
                                      int n0, int len, double& tail) {
  std::vector<double> c(len);
  double x = vacuum_c0(kind, fr, n0);
  for (int j = 0; j < len; ++j) {
    c[j] = x;
    x *= vacuum_ratio(kind, fr, n0, j);
  }
  tail = 0;
  for (int j = len; x != 0; ++j) {
    const double t = x * x;
    tail += t;
    if (t < 1e-40 * std::max(tail, 1e-300) || j > len + 100000) break;
    x *= vacuum_ratio(kind, fr, n0, j);
  }
  return c;
}

// Cutoff in representation steps such that the vacuum tail is below tol.
int vacuum_length(ModelKind kind, const BogolubovFrame& fr, int n0, double tol) {
  int len = 16;
  while (true) {
    double tail = 0;
    vacuum_amplitudes(kind, fr, n0, len, tail);
    if (tail < tol || len > 1 << 16) return len;
    len *= 2;
  }
}

// Vacuum cutoff for building alpha-Fock states up to index `top`: each raising
// step weights bare index n by about sqrt(n), so the discarded tail must be
// small after that amplification, not just in norm.
int raised_vacuum_length(ModelKind kind, const BogolubovFrame& fr, int n0, int top,
                         const std::vector<double>& logNorm2) {
  int len = vacuum_length(kind, fr, n0, 1e-32);
  const double uv = std::log(fr.u + std::abs(fr.v));
  while (len < 1 << 14) {
    double tail = 0;
    const auto c = vacuum_amplitudes(kind, fr, n0, len, tail);
    const double last = std::abs(c.back());
    if (last == 0) return len;
    const double reach = kind == ModelKind::TwoPhoton
                             ? top * (uv + 0.5 * std::log(2.0 * len + top))
                             : top * (2 * uv + std::log(double(len + n0 + top)));
    if (std::log(last) + reach - 0.5 * logNorm2[top] < std::log(1e-18)) return len;
    len *= 2;
  }
  return len;
}

// Alpha-basis matrix elements M_km = sqrt(|m|^2/|k|^2) <k^|R|m^> of the four
// rotated blocks, from normalized alpha-Fock states built numerically.
struct AlphaBlocks {
  std::vector<MatrixXd> M;  // 11, 12, 21, 22 indexed by representation index
};

AlphaBlocks alpha_blocks(const std::vector<MatrixXd>& R, const MatrixXd& raise,
                         const VectorXd& vac, int count,
                         const std::vector<double>& logNorm2) {
  std::vector<VectorXd> hat(count);
  hat[0] = vac;
  for (int m = 1; m < count; ++m) {
    hat[m] = raise * hat[m - 1];
    hat[m] /= std::exp(0.5 * (logNorm2[m] - logNorm2[m - 1]));
  }
  AlphaBlocks ab;
  for (const MatrixXd& r : R) {
    MatrixXd M(count, count);
    for (int k = 0; k < count; ++k) {
      const VectorXd rk = r.transpose() * hat[k];
      for (int m = 0; m < count; ++m)
        M(k, m) = std::exp(0.5 * (logNorm2[m] - logNorm2[k])) * rk.dot(hat[m]);
    }
    ab.M.push_back(std::move(M));
  }
  return ab;
}

}  // namespace

double chain_residual(const ModelParams& params, double E, int rows) {
  if (params.g == 0) throw DomainError("chain residual needs g != 0");
  const BogolubovFrame fr = bogolubov_frame(params);
  ChainModel cm(params, fr);
  ChainOptions co;
  const CoefficientChain ch = build_chain(cm, E, co);
  rows = std::min(rows, ch.truncation - 2);
  const int n0 = params.sector.n0;
  const int top = cm.start() + cm.step() * (rows + 1);  // highest chain index used
  const int count = top + 1;                            // alpha indices 0..top

  std::vector<double> logNorm2(count);
  for (int m = 0; m < count; ++m)
    logNorm2[m] = params.kind == ModelKind::TwoPhoton
                      ? std::lgamma(m + 1.0)
                      : std::lgamma(m + 1.0) + std::lgamma(n0 + m + 1.0) - std::lgamma(n0 + 1.0);

  AlphaBlocks ab;
  if (params.kind == ModelKind::TwoPhoton) {
    const int len = raised_vacuum_length(params.kind, fr, n0, top, logNorm2);
    const int nb = 2 * len + 2 * count + 8;
    double tail = 0;
    const auto c = vacuum_amplitudes(params.kind, fr, n0, len, tail);
    VectorXd vac = VectorXd::Zero(nb);
    for (int j = 0; j < len; ++j) vac[2 * j] = c[j];
    const TwoPhotonOps o = two_photon_rotated(params, fr, nb);
    const MatrixXd raise = fr.u * o.a.transpose() + fr.v * o.a;
    ab = alpha_blocks({o.r11, o.r12, o.r21, o.r22}, raise, vac, count, logNorm2);
  } else {
    const int len = raised_vacuum_length(params.kind, fr, n0, top, logNorm2) + count + 4;
    const TwoModeSpace sp(n0 + len + 4);
    const TwoModeRotated o = two_mode_rotated(params, fr, sp);
    const Sparse b1t = Sparse(fr.u * sp.a1 + fr.v * Sparse(sp.a2.transpose())).transpose();
    const Sparse b2t = Sparse(fr.u * sp.a2 + fr.v * Sparse(sp.a1.transpose())).transpose();
    const MatrixXd raise = sp.ladder(b1t * b2t, n0, len);
    double tail = 0;
    const auto c = vacuum_amplitudes(params.kind, fr, n0, len, tail);
    VectorXd vac = Eigen::Map<const VectorXd>(c.data(), len);
    ab = alpha_blocks({sp.ladder(o.r11, n0, len), sp.ladder(o.r12, n0, len),
                       sp.ladder(o.r21, n0, len), sp.ladder(o.r22, n0, len)},
                      raise, vac, count, logNorm2);
  }

  double worst = 0;
  for (int j = 0; j < rows; ++j) {
    const int k = ch.index[j];
    double r1 = -E * ch.L(j), r2 = -E * ch.K(j);
    double s1 = std::abs(r1), s2 = std::abs(r2);
    for (int i = std::max(0, j - 1); i <= j + 1; ++i) {
      const int m = ch.index[i];
      const double t11 = ab.M[0](k, m) * ch.L(i), t12 = ab.M[1](k, m) * ch.K(i);
      const double t21 = ab.M[2](k, m) * ch.L(i), t22 = ab.M[3](k, m) * ch.K(i);
      r1 += t11 + t12;
      r2 += t21 + t22;
      s1 += std::abs(t11) + std::abs(t12);
      s2 += std::abs(t21) + std::abs(t22);
    }
    worst = std::max({worst, std::abs(r1) / s1, std::abs(r2) / s2});
  }
  return worst;
}

ConjugationReport bogolubov_conjugation_check(const ModelParams& params,
                                              int nTrunc) {
  if (nTrunc < 8) throw ConfigError("nTrunc must be at least 8");
  const BogolubovFrame fr = bogolubov_frame(params);
  ConjugationReport rep;
  if (params.kind == ModelKind::TwoPhoton)
    check_two_photon(params, fr, nTrunc, rep);
  else
    check_two_mode(params, fr, nTrunc, rep);

  // Recurrence rows, at an energy between the two lowest poles.
  ChainModel cm(params, fr);
  if (params.g != 0 && !cm.degenerate()) {
    const double E = 0.5 * (cm.pole(cm.start()) + cm.pole(cm.start() + cm.step()));
    record(rep, "recurrence", params.omega * chain_residual(params, E, 10));
  }

  const double limit = 1e-8 * params.omega;
  for (const auto& [name, dev] : rep.classes)
    if (!(dev <= limit))
      throw NumericError("conjugation check failed for " + name +
                         ": deviation " + std::to_string(dev));
  return rep;
}

double vacuum_tail_mass(ModelKind kind, const BogolubovFrame& fr, int n0,
                        int nTrunc) {
  const int len = kind == ModelKind::TwoPhoton ? nTrunc / 2 + 1 : nTrunc + 1;
  double tail = 0;
  vacuum_amplitudes(kind, fr, n0, len, tail);
  return tail;
}

std::vector<double> vacuum_state_alpha(const BogolubovFrame& fr, int nTrunc) {
  const int len = nTrunc / 2 + 1;
  double tail = 0;
  const auto c = vacuum_amplitudes(ModelKind::TwoPhoton, fr, 0, len, tail);
  if (tail > 1e-10)
    throw NumericError("cutoff " + std::to_string(nTrunc) +
                       " leaves alpha-vacuum tail mass " + std::to_string(tail));
  std::vector<double> out(nTrunc + 1, 0.0);
  double norm = 0;
  for (int j = 0; j < len; ++j) {
    out[2 * j] = c[j];
    norm += c[j] * c[j];
  }
  norm = std::sqrt(norm);
  for (double& x : out) x /= norm;
  return out;
}

std::vector<double> alpha_fock(const BogolubovFrame& fr, int m, int nTrunc) {
  std::vector<double> x = vacuum_state_alpha(fr, nTrunc);
  for (int k = 0; k < m; ++k) {
    std::vector<double> y(nTrunc + 1, 0.0);
    for (int n = 0; n <= nTrunc; ++n) {
      if (n > 0) y[n] += fr.u * std::sqrt(double(n)) * x[n - 1];
      if (n < nTrunc) y[n] += fr.v * std::sqrt(n + 1.0) * x[n + 1];
    }
    x = std::move(y);
  }
  return x;
}

std::vector<double> two_mode_vacuum(const BogolubovFrame& fr, int n0, int nTrunc) {
  double tail = 0;
  auto c = vacuum_amplitudes(ModelKind::TwoMode, fr, n0, nTrunc + 1, tail);
  if (tail > 1e-10)
    throw NumericError("cutoff " + std::to_string(nTrunc) +
                       " leaves two-mode vacuum tail mass " + std::to_string(tail));
  double norm = 0;
  for (double x : c) norm += x * x;
  norm = std::sqrt(norm);
  for (double& x : c) x /= norm;
  return c;
}

}  // namespace rabi
