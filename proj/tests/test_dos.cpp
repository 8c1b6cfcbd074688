#include <catch2/catch_amalgamated.hpp>

#include "cmv/dos.hpp"
#include "oracles.hpp"

using cmv::AtomicCircleMeasure;
using cmv::Complex;
using cmv::density_of_states;
using cmv::dos_caratheodory;
using cmv::DosApproximation;
using cmv::ErgodicFamily;
using cmv::k_ac;
using cmv::rho_infinity;
using cmv::SamplingPlan;
using cmv::thouless_gamma;
using cmv::ThoulessPotential;

namespace {

const ErgodicFamily kFree = ErgodicFamily::constant({0.0, 0.0});
const ErgodicFamily kHalf = ErgodicFamily::constant({0.5, 0.0});
const ErgodicFamily kPer = ErgodicFamily::periodic({{0.3, 0.0}, {0.0, -0.4}});
const SamplingPlan kExact = SamplingPlan::exact_periodic();

ThoulessPotential uniform_potential(int atoms = 2048) {
  return {DosApproximation{AtomicCircleMeasure::uniform(atoms), 0, 1, 1, -1.0}, 1.0};
}

}  // namespace

TEST_CASE("density of states: free case is uniform, mass exactly one") {
  const DosApproximation dos = density_of_states(kFree, kExact, 200);
  CHECK(cmv::kolmogorov_to_uniform(dos.measure) <= 1e-2);
  CHECK(dos.measure.total_mass() == 1.0);
  CHECK(std::abs(dos.measure.weight_sum() - 1.0) < 1e-12);
}

TEST_CASE("density of states: periodic support avoids the gaps") {
  const DosApproximation dos = density_of_states(kPer, kExact, 150, {-1.0, 0.0}, 1, true, 2);
  CHECK(dos.kolmogorov_self >= 0.0);
  // all but a vanishing fraction of atoms lie in the discriminant bands;
  // allow a thin fringe near the band edges
  int outside = 0;
  for (const cmv::CircleAtom& a : dos.measure.atoms()) {
    bool near_band = false;
    for (double d : {0.0, 0.02, -0.02})
      near_band = near_band || oracle::in_band(kPer.alphas, a.theta + d);
    if (!near_band) ++outside;
  }
  CHECK(outside == 0);
}

TEST_CASE("density of states: boundary pooling refines the measure") {
  const DosApproximation one = density_of_states(kFree, kExact, 50, {-1.0, 0.0}, 1);
  const DosApproximation eight = density_of_states(kFree, kExact, 50, {-1.0, 0.0}, 8, false, 2);
  CHECK(eight.measure.size() == 8 * one.measure.size());  // no collisions across the pool
  CHECK(cmv::kolmogorov_to_uniform(eight.measure) < cmv::kolmogorov_to_uniform(one.measure));
}

TEST_CASE("density of states: boundary-condition robustness") {
  const int n = 200;
  const DosApproximation a = density_of_states(kPer, kExact, n, {-1.0, 0.0});
  const DosApproximation b = density_of_states(kPer, kExact, n, {0.0, 1.0});
  CHECK(cmv::kolmogorov_distance(a.measure, b.measure) <= 5.0 / n);
}

TEST_CASE("density of states: self-distance decreases as the volume doubles") {
  const DosApproximation d50 = density_of_states(kPer, kExact, 50);
  const DosApproximation d100 = density_of_states(kPer, kExact, 100);
  const DosApproximation d200 = density_of_states(kPer, kExact, 200);
  const double k1 = cmv::kolmogorov_distance(d50.measure, d100.measure);
  const double k2 = cmv::kolmogorov_distance(d100.measure, d200.measure);
  CHECK(k2 < k1);
}

TEST_CASE("averaged Green identity: free case vanishes") {
  const auto pair = cmv::dos_average_check(kFree, kExact, 60, {0.4, 0.0});
  CHECK(std::abs(pair.lhs) < 1e-6);
  CHECK(std::abs(pair.rhs) < 1e-6);
}

TEST_CASE("averaged Green identity: volume extrapolation removes the boundary term") {
  for (const ErgodicFamily& fam : {kHalf, kPer}) {
    for (Complex z : {Complex{0.4, 0.0}, Complex{0.0, 0.3}}) {
      const auto pair = cmv::dos_average_check(fam, kExact, 100, z, {-1.0, 0.0}, 2);
      CHECK(std::abs(pair.lhs - pair.rhs_extrapolated) < 1e-3);
      // the raw transform carries the 1/(2n+1) defect
      CHECK(std::abs(pair.lhs - pair.rhs) < 2e-2);
      CHECK(std::abs(pair.lhs - pair.rhs_extrapolated) < std::abs(pair.lhs - pair.rhs));
    }
  }
}

TEST_CASE("rho_infinity closed forms") {
  CHECK(rho_infinity(kFree, kExact, 100) == 1.0);
  CHECK(std::abs(rho_infinity(kHalf, kExact, 128) - std::sqrt(0.75)) < 1e-10);
  // two-term exact average (0.91 * 0.84)^{1/4}
  const double want = std::exp(0.25 * (std::log(0.91) + std::log(0.84)));
  CHECK(std::abs(want - 0.9350403183008582) < 1e-12);
  CHECK(std::abs(rho_infinity(kPer, kExact, 128) - want) < 1e-6);
}

TEST_CASE("thouless_gamma: uniform measure closed forms") {
  const ThoulessPotential pot = uniform_potential();
  CHECK(std::abs(thouless_gamma(pot, {0.5, 0.0}).value) < 1e-3);
  CHECK(std::abs(thouless_gamma(pot, {2.0, 0.0}).value - std::log(2.0)) < 1e-2);
  // at z = 0 the value is exactly -log rho_inf
  const ThoulessPotential pot2{pot.dos, std::sqrt(0.75)};
  CHECK(thouless_gamma(pot2, {0.0, 0.0}).value == -std::log(std::sqrt(0.75)));
}

TEST_CASE("thouless_gamma: atoms at z are excluded and reported") {
  const ThoulessPotential pot = uniform_potential(16);
  const auto v = thouless_gamma(pot, cmv::unit_circle(0.0));
  CHECK(v.excluded_atoms == 1);
}

TEST_CASE("dos_caratheodory: both routes, exact at the origin") {
  const ThoulessPotential uni = uniform_potential();
  CHECK(std::abs(dos_caratheodory(uni, {0.0, 0.5}).value - 1.0) < 1e-3);

  const auto at_zero = dos_caratheodory(uni, {0.0, 0.0});
  CHECK(at_zero.value == Complex{1.0, 0.0});
  CHECK(at_zero.alternate == Complex{1.0, 0.0});

  const DosApproximation dos = density_of_states(kPer, kExact, 150);
  const ThoulessPotential pot{dos, rho_infinity(kPer, kExact, 128)};
  const auto k = dos_caratheodory(pot, 0.7 * cmv::unit_circle(std::numbers::pi / 3));
  CHECK(k.routes_agree);
  CHECK(k.route_gap <= 1e-10);
  CHECK_THROWS_AS(dos_caratheodory(pot, {1.2, 0.0}), cmv::ConfigError);
}

TEST_CASE("k_ac: uniform, gap, and band values") {
  const ThoulessPotential uni = uniform_potential();
  const auto flat = k_ac(uni, 2.7, cmv::RadialLadder{4, 14, 1e-3});
  CHECK(flat.converged);
  CHECK(std::abs(flat.value - 1.0 / cmv::kTwoPi) < 1e-3);

  const cmv::RadialLadder dos_ladder{4, 14, 2e-2};
  const DosApproximation dper = density_of_states(kPer, kExact, 200, {-1.0, 0.0}, 8, false, 2);
  const ThoulessPotential pper{dper, rho_infinity(kPer, kExact, 128)};
  // deep gap center at theta = pi (two-band family)
  CHECK(k_ac(pper, std::numbers::pi, dos_ladder).value <= 1e-2);

  const DosApproximation dhalf = density_of_states(kHalf, kExact, 200, {-1.0, 0.0}, 8, false, 2);
  const ThoulessPotential phalf{dhalf, rho_infinity(kHalf, kExact, 128)};
  const auto band = k_ac(phalf, std::numbers::pi, dos_ladder);
  CHECK(band.converged);
  CHECK(std::abs(band.value - oracle::constant_kac(0.5, std::numbers::pi)) < 5e-2);
}
