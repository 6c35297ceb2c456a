#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "common.hpp"
#include "rabi/errors.hpp"
#include "rabi/observables.hpp"
#include "rabi/spectrum.hpp"

using namespace rabi;
using testing::two_mode;
using testing::two_photon;
using cd = std::complex<double>;

namespace {

SpinBosonState make_state(std::vector<cd> up, std::vector<cd> down) {
  SpinBosonState s;
  s.up = std::move(up);
  s.down = std::move(down);
  s.normalized = true;
  return s;
}

}  // namespace

TEST_CASE("reduced density and entropy of simple states") {
  const auto product = make_state({1, 0, 0}, {0, 0, 0});
  const ReducedSpinDensity r = reduced_spin_density(product);
  CHECK(std::abs(r.rho(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(r.rho(1, 1)) < 1e-15);
  CHECK(entanglement_entropy(r) == 0);

  const double h = 1 / std::sqrt(2.0);
  const auto bell = make_state({h, 0}, {0, h});
  const ReducedSpinDensity b = reduced_spin_density(bell);
  CHECK(std::abs(b.rho(0, 0) - 0.5) < 1e-15);
  CHECK(std::abs(b.rho(0, 1)) < 1e-15);
  CHECK(entanglement_entropy(b) == doctest::Approx(1).epsilon(1e-15));

  // same boson state on both spins: a product state in a rotated spin basis
  const auto tilted = make_state({h, 0}, {h, 0});
  CHECK(entanglement_entropy(reduced_spin_density(tilted)) < 1e-7);
}

TEST_CASE("unnormalized input is a contract violation") {
  const auto s = make_state({1, 1}, {0, 0});
  CHECK_THROWS_AS(reduced_spin_density(s), ContractError);
  CHECK_THROWS_AS(photon_number_distribution(s), ContractError);
}

TEST_CASE("photon statistics") {
  const auto vac = make_state({0, 0}, {1, 0});
  const auto P = photon_number_distribution(vac);
  CHECK(P[0] == 1);
  CHECK(participation_ratio(P) == 1);
  CHECK(participation_ratio({0.25, 0.25, 0.25, 0.25}) == doctest::Approx(4));
}

TEST_CASE("parity map applied four times is the identity") {
  SpinBosonState s = make_state({cd(0.1, 0.2), cd(-0.3, 0.05), cd(0.7, -0.1), cd(0.2, 0.2), cd(0.0, 0.3)},
                                {cd(0.4, 0), cd(0, -0.2), cd(0.1, 0.1), cd(-0.5, 0.0), cd(0.3, 0.3)});
  for (ModelKind kind : {ModelKind::TwoPhoton, ModelKind::TwoMode}) {
    s.kind = kind;
    SpinBosonState t = s;
    for (int i = 0; i < 4; ++i) t = parity_partner(t);
    CHECK(t.up == s.up);
    CHECK(t.down == s.down);
    SpinBosonState u = parity_partner(parity_partner(s));
    if (kind == ModelKind::TwoMode) CHECK(u.up == s.up);
  }
}

TEST_CASE("oracle eigenvectors are parity eigenstates") {
  const ModelParams p = two_photon(0.5);
  const EigenDecomposition ed = diagonalize(build_hamiltonian(p, 80));
  for (int col = 0; col < 6; ++col) {
    const SpinBosonState s = state_from_oracle(ed, col);
    const SpinBosonState bar = parity_partner(s);
    const cd pv = parity_value(p.kind, ed.classes[col]);
    CHECK(std::abs(overlap(s, bar) - pv) < 1e-12);
  }
}

TEST_CASE("crossing states are degenerate eigenstates") {
  struct Case {
    ModelParams p;
    double E;
    cd C;
  };
  const JuddianPoint e = juddian_analytic(ModelKind::TwoPhoton, 1, 0.2, 0.25, 0);
  const JuddianPoint o = juddian_analytic(ModelKind::TwoPhoton, 1, 0.2, 0.25, 1);
  const JuddianPoint t0 = juddian_analytic(ModelKind::TwoMode, 1, 0.2, 0.5, 0, 0);
  const JuddianPoint t1 = juddian_analytic(ModelKind::TwoMode, 1, 0.2, 0.5, 0, 1);
  const Case cases[] = {
      {two_photon(e.gStar), e.EStar, 1.0},
      {two_photon(o.gStar, FockParity::Odd), o.EStar, cd(0, 1)},
      {two_mode(t0.gStar, 0), t0.EStar, 1.0},
      {two_mode(t1.gStar, 1), t1.EStar, 1.0},
  };
  for (const Case& c : cases) {
    const SpinBosonState a = assemble_crossing_state(c.p, c.C);
    const SpinBosonState b = assemble_crossing_state(c.p, -c.C);
    CHECK(eigen_residual(c.p, a, c.E) < 1e-7);
    CHECK(eigen_residual(c.p, b, c.E) < 1e-7);
    CHECK(std::abs(a.norm2() - 1) < 1e-12);
    CHECK(std::abs(overlap(a, b)) < 1e-10);
    // each is a parity eigenstate
    const cd pa = overlap(a, parity_partner(a));
    CHECK(std::abs(std::abs(pa) - 1) < 1e-10);
    const double S = entanglement_entropy(reduced_spin_density(a));
    CHECK(S >= 0);
    CHECK(S <= 1);
  }
}

TEST_CASE("crossing state refusals") {
  CHECK_THROWS_AS(assemble_crossing_state(two_photon(0.5), 1.0), DomainError);
  const JuddianPoint e = juddian_analytic(ModelKind::TwoPhoton, 1, 0.2, 0.25, 0);
  CHECK_THROWS_AS(assemble_crossing_state(two_photon(e.gStar), cd(0, 1)), ConfigError);
}

TEST_CASE("crossing residual follows the vacuum tail") {
  const JuddianPoint e = juddian_analytic(ModelKind::TwoPhoton, 1, 0.2, 0.25, 0);
  const ModelParams p = two_photon(e.gStar);
  CrossingOptions a, b;
  a.nTrunc = 48;
  b.nTrunc = 64;
  a.residualTol = b.residualTol = 1;
  const double ra = eigen_residual(p, assemble_crossing_state(p, 1.0, a), e.EStar);
  const double rb = eigen_residual(p, assemble_crossing_state(p, 1.0, b), e.EStar);
  CHECK(rb < ra);
}

TEST_CASE("entropy is zero at g = 0") {
  EntropyOptions eo;
  eo.levels = 2;
  const EntropyTable t = entropy_sweep(two_photon(0), {0.0}, eo);
  for (const EntropyRow& r : t.rows) CHECK(r.S < 1e-12);
}

TEST_CASE("entropy jump at the even crossing") {
  const double gs = 4 * std::sqrt(2.0) / (5 * std::sqrt(3.0));
  const EntropyTable t = entropy_sweep(two_photon(0), linspace(0.5, 0.75, 26));
  REQUIRE(t.jumps.size() == 1);
  const EntropyJump& j = t.jumps[0];
  CHECK(j.gLo <= gs);
  CHECK(j.gHi >= gs);
  CHECK(j.gHi - j.gLo < 2e-6);
  CHECK(j.parityLo == ParityLabel::PlusOne);
  CHECK(j.parityHi == ParityLabel::MinusOne);
  for (const EntropyRow& r : t.rows) {
    CHECK(r.S >= 0);
    CHECK(r.S <= 1);
  }
}

TEST_CASE("entropy jump at the two-mode crossing") {
  const double gs = 4 / std::sqrt(15.0);
  const EntropyTable t = entropy_sweep(two_mode(0), linspace(0.9, 1.2, 31));
  REQUIRE(t.jumps.size() == 1);
  CHECK(t.jumps[0].gLo <= gs);
  CHECK(t.jumps[0].gHi >= gs);
}

TEST_CASE("near-degenerate rows are flagged") {
  const JuddianPoint e = juddian_analytic(ModelKind::TwoPhoton, 1, 0.2, 0.25, 0);
  const EntropyTable t = entropy_sweep(two_photon(0), {e.gStar});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0].ambiguous);
  CHECK(t.rows[1].ambiguous);
}

TEST_CASE("condensation scan") {
  CondensationOptions co;
  co.k = 3;
  const auto rows = condensation_scan(two_photon(0), {0.0, 0.4, 0.7}, co);
  CHECK(rows[0].poles == std::vector<double>{0, 2, 4});
  CHECK(rows[0].eta == 1);
  CHECK(rows[1].eta > rows[2].eta);
  CHECK(rows[2].poles.back() - rows[2].poles.front() < rows[1].poles.back() - rows[1].poles.front());
  CHECK(rows[2].oracleSpread < rows[1].oracleSpread);
  CHECK_THROWS_AS(condensation_scan(two_photon(0), {0.85}, co), ValidityError);
}

TEST_CASE("supercritical scan on small cutoffs") {
  SupercriticalOptions so;
  const SupercriticalReport r = supercritical_scan(two_photon(0), 0.85, {60, 90, 120}, so);
  CHECK(r.points.size() == 3);
  for (const auto& pt : r.points) CHECK(pt.slope < 0);
  CHECK(r.points[2].groundEnergy < r.points[0].groundEnergy);
  CHECK(r.exponent > 0.5);
  CHECK(r.groundEntropy > 0.9);
  CHECK(r.lowLevels.size() == 12);
  CHECK(r.fourClassGrouping);
  CHECK(r.diagnostics.empty());
  CHECK_THROWS_AS(supercritical_scan(two_photon(0), 0.5, {60, 90}, so), DomainError);
  CHECK_THROWS_AS(supercritical_scan(two_photon(0), 0.85, {90, 60}, so), ConfigError);
}
