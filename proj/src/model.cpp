#include "rabi/model.hpp"

#include <algorithm>
#include <cmath>

#include "rabi/errors.hpp"

namespace rabi {

void validate(const ModelParams& p) {
  if (!std::isfinite(p.omega) || !std::isfinite(p.delta) ||
      !std::isfinite(p.g) || !std::isfinite(p.lambda))
    throw ConfigError("model parameters must be finite");
  if (p.omega <= 0) throw ConfigError("omega must be positive");
  if (p.lambda < 0) throw ConfigError("lambda must be non-negative");
  if (p.sector.n0 < 0) throw ConfigError("n0 must be non-negative");
}

double kappa(ModelKind kind, const SectorLabel& s) {
  if (kind == ModelKind::TwoMode) return (s.n0 + 1) / 2.0;
  return s.fockParity == FockParity::Even ? 0.25 : 0.75;
}

int chain_start(ModelKind kind, const SectorLabel& s) {
  if (kind == ModelKind::TwoMode) return 0;
  return s.fockParity == FockParity::Even ? 0 : 1;
}

int chain_step(ModelKind kind) { return kind == ModelKind::TwoPhoton ? 2 : 1; }

std::string to_string(ModelKind k) {
  return k == ModelKind::TwoPhoton ? "two-photon" : "two-mode";
}

std::string to_string(Branch b) { return b == Branch::Plus ? "+" : "-"; }

std::string sector_name(ModelKind kind, const SectorLabel& s) {
  if (kind == ModelKind::TwoMode) return "n0=" + std::to_string(s.n0);
  return s.fockParity == FockParity::Even ? "even" : "odd";
}

RotationFrames rotation_frames(double beta) {
  RotationFrames f;
  const double h = 1.0 / std::sqrt(2.0);
  f.W << h, -h, h, h;
  const double c = std::cos(beta), s = std::sin(beta);
  f.U << c, -s, s, c;
  f.V = f.U;
  return f;
}

RotatedCouplings rotated_couplings(const ModelParams& params, double beta) {
  const double c = std::cos(beta), s = std::sin(beta);
  const double lam = params.lambda, g = params.g;
  RotatedCouplings rc;
  rc.p = params.delta * std::cos(2 * beta);
  rc.q = params.delta * std::sin(2 * beta);
  rc.r = 0.5 * std::sin(2 * beta) * (1 + lam) * g;
  rc.s = (c * c - lam * s * s) * g;
  rc.t = (lam * c * c - s * s) * g;
  return rc;
}

double critical_coupling(const ModelParams& params) {
  if (params.lambda == -1.0) throw ConfigError("singular anisotropy lambda = -1");
  const double scale = params.kind == ModelKind::TwoPhoton ? 1.0 : 2.0;
  return scale * params.omega / std::abs(1 + params.lambda);
}

BogolubovFrame try_bogolubov_frame(const ModelParams& params) {
  validate(params);
  BogolubovFrame f;
  f.gCritical = critical_coupling(params);
  const double g = params.g, lam = params.lambda, w = params.omega;
  if (!(std::abs(g) < f.gCritical)) {
    f.valid = false;
    return f;
  }
  // Two-mode frames carry g/2 in place of g.
  const double s = params.kind == ModelKind::TwoPhoton ? 1.0 : 0.25;
  const double A = (1 + lam) * (1 + lam) * s / (w * w);
  const double B = (1 - lam) * (1 - lam) * s / (w * w);
  const double g2 = g * g;
  const double eta = std::sqrt(std::max(0.0, 1 - A * g2) / (1 - B * g2));
  if (!(eta > 0)) {
    f.valid = false;
    return f;
  }
  f.eta = eta;
  f.u = std::sqrt((1 + eta) / (2 * eta));
  f.vOverG = std::sqrt((A - B) / ((1 - B * g2) * 2 * eta * (1 + eta)));
  f.v = f.vOverG * g;
  f.cos2b = (1 - lam) / (1 + lam) * eta;
  f.sin2b = std::sqrt(std::max(0.0, 1 - f.cos2b * f.cos2b));
  f.beta = 0.5 * std::acos(f.cos2b);
  f.etaPrime = eta * (1 - B * g2);
  f.valid = true;
  return f;
}

BogolubovFrame bogolubov_frame(const ModelParams& params) {
  BogolubovFrame f = try_bogolubov_frame(params);
  if (!f.valid)
    throw ValidityError("|g| = " + std::to_string(std::abs(params.g)) +
                            " is not below the critical coupling g_c = " +
                            std::to_string(f.gCritical),
                        f.gCritical);
  return f;
}

}  // namespace rabi
