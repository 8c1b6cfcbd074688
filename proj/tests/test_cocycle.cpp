#include <catch2/catch_amalgamated.hpp>

#include "cmv/cmv_matrix.hpp"
#include "cmv/cocycle.hpp"
#include "oracles.hpp"

using cmv::cocycle_product;
using cmv::CocycleProduct;
using cmv::Complex;
using cmv::ErgodicFamily;
using cmv::floquet_gamma;
using cmv::initial_state;
using cmv::lyapunov;
using cmv::SamplingPlan;
using cmv::szego_step;
using cmv::zero_set;
using cmv::ZeroSetArcs;

namespace {

const ErgodicFamily kFree = ErgodicFamily::constant({0.0, 0.0});
const ErgodicFamily kHalf = ErgodicFamily::constant({0.5, 0.0});
const ErgodicFamily kPer = ErgodicFamily::periodic({{0.3, 0.0}, {0.0, -0.4}});
const SamplingPlan kExact = SamplingPlan::exact_periodic();

double angle_gap(double a, double b) {
  double d = std::fmod(std::abs(a - b), cmv::kTwoPi);
  return std::min(d, cmv::kTwoPi - d);
}

}  // namespace

TEST_CASE("szego step: entries and determinants") {
  const Eigen::Matrix2cd raw = szego_step({0.0, 0.0}, {2.0, 0.0}, false);
  CHECK(raw(0, 0) == Complex{2.0, 0.0});
  CHECK(raw(0, 1) == Complex{0.0, 0.0});
  CHECK(raw(1, 0) == Complex{0.0, 0.0});
  CHECK(raw(1, 1) == Complex{1.0, 0.0});

  // det(raw) = z (1 - |alpha|^2)
  const Eigen::Matrix2cd a = szego_step({0.5, 0.0}, {1.0, 0.0}, false);
  CHECK(std::abs(a.determinant() - Complex{0.75, 0.0}) < 1e-12);
  const Eigen::Matrix2cd t = szego_step({0.5, 0.0}, {1.0, 0.0}, true);
  CHECK(std::abs(t.determinant() - Complex{1.0, 0.0}) < 1e-12);

  const Complex z{0.3, 0.7};
  for (Complex alpha : {Complex{0.2, -0.3}, Complex{0.0, 0.6}}) {
    CHECK(std::abs(szego_step(alpha, z, false).determinant() - z * (1.0 - std::norm(alpha))) <
          1e-12);
    CHECK(std::abs(szego_step(alpha, z, true).determinant() - z) < 1e-12);
  }
  CHECK_THROWS_AS(szego_step({1.0, 0.0}, z), cmv::ConfigError);
}

TEST_CASE("normalized cocycle determinant equals z^N") {
  const int steps = 1000;
  for (const ErgodicFamily& fam :
       {kHalf, kPer, ErgodicFamily::random_iid(0.5, 11)}) {
    for (Complex z : {Complex{0.63, 0.31}, 1.2 * cmv::unit_circle(2.0)}) {
      const CocycleProduct p = cocycle_product(fam, initial_state(fam), z, steps);
      const Complex logdet = p.log_det();
      const double want_mod = steps * std::log(std::abs(z));
      const double want_arg = steps * std::arg(z);
      CHECK(std::abs(logdet.real() - want_mod) <= 1e-8 * std::max(1.0, std::abs(want_mod)));
      double darg = std::remainder(logdet.imag() - want_arg, cmv::kTwoPi);
      CHECK(std::abs(darg) <= 1e-8);
    }
  }
}

TEST_CASE("shift covariance of cocycle products") {
  const Complex z{0.4, 0.5};
  for (const ErgodicFamily& fam : {kPer, ErgodicFamily::random_iid(0.4, 3)}) {
    const cmv::OmegaState s = initial_state(fam);
    const cmv::OmegaState sh = shifted(fam, s);
    const int n = 37;
    const CocycleProduct left = cocycle_product(fam, sh, z, n, true, 1 << 20);
    const CocycleProduct one = cocycle_product(fam, s, z, 1, true, 1 << 20);
    const CocycleProduct full = cocycle_product(fam, s, z, n + 1, true, 1 << 20);
    const Eigen::Matrix2cd lhs = left.factor * one.factor;
    CHECK((lhs - full.factor).cwiseAbs().maxCoeff() < 1e-10 * full.factor.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("lyapunov: free closed forms") {
  CHECK(std::abs(lyapunov(kFree, kExact, {2.0, 0.0}, 5000).value - std::log(2.0)) < 1e-6);
  CHECK(std::abs(lyapunov(kFree, kExact, {0.5, 0.0}, 5000).value) < 1e-6);
}

TEST_CASE("lyapunov: constant family at z=0 gives -log rho") {
  const double want = -0.5 * std::log(0.75);
  CHECK(std::abs(lyapunov(kHalf, kExact, {0.0, 0.0}, 10000).value - want) < 1e-3);
  CHECK(std::abs(floquet_gamma(kHalf, {0.0, 0.0}) - want) < 1e-14);
}

TEST_CASE("lyapunov: estimates do not depend on the rescale period") {
  const Complex z = 0.9 * cmv::unit_circle(1.2);
  const double v8 = lyapunov(kPer, kExact, z, 4096, 8).value;
  const double v32 = lyapunov(kPer, kExact, z, 4096, 32).value;
  const double v128 = lyapunov(kPer, kExact, z, 4096, 128).value;
  CHECK(std::abs(v8 - v32) < 1e-10);
  CHECK(std::abs(v32 - v128) < 1e-10);

  const auto iid = ErgodicFamily::random_iid(0.5, 5);
  const auto mc = SamplingPlan::monte_carlo(4, 2);
  const double w8 = lyapunov(iid, mc, z, 2048, 8).value;
  const double w128 = lyapunov(iid, mc, z, 2048, 128).value;
  CHECK(std::abs(w8 - w128) < 1e-10);
}

TEST_CASE("lyapunov: N-step estimates approach the Floquet exponent") {
  for (const ErgodicFamily& fam : {kHalf, kPer}) {
    for (Complex z : {Complex{0.4, 0.0}, 0.9 * cmv::unit_circle(2.4), Complex{0.0, 1.7}}) {
      const double exact = floquet_gamma(fam, z);
      const double est = lyapunov(fam, kExact, z, 20000).value;
      REQUIRE(std::abs(est - exact) < 2e-3);
    }
  }
}

TEST_CASE("zero set: free case covers the whole circle") {
  const ZeroSetArcs zs = zero_set(kFree, kExact, 64, 2000, 5e-3, 2);
  REQUIRE(zs.arcs.size() == 1);
  CHECK(zs.arcs[0].length() == cmv::kTwoPi);
  CHECK(zs.contains(0.0));
  CHECK(zs.contains(3.0));
}

TEST_CASE("zero set: random coefficients leave it empty") {
  const auto iid = ErgodicFamily::random_iid(0.5, 7);
  const ZeroSetArcs zs = zero_set(iid, SamplingPlan::monte_carlo(4, 1), 64, 4000, 1e-2, 2);
  CHECK(zs.empty());
  CHECK(zs.min_gamma() >= 1e-2);
}

TEST_CASE("zero set: constant family band matches truncation spectrum and discriminant") {
  const int grid = 256;
  const ZeroSetArcs zs = zero_set(kHalf, kExact, grid, 10000, 5e-3, 2);
  REQUIRE(zs.arcs.size() == 1);
  const cmv::Arc band = zs.arcs[0];
  const double edge = oracle::constant_band_edge(0.5);
  const double slack = (zs.margin_cells + 1.5) * cmv::kTwoPi / grid;
  CHECK(angle_gap(band.lo, edge) <= slack);
  CHECK(angle_gap(cmv::wrap_angle(band.hi), cmv::kTwoPi - edge) <= slack);

  // truncation eigenvalues land inside the (margin-restored) band
  const auto m =
      counting_measure(cmv::finite_cmv(kHalf, initial_state(kHalf), 400));
  for (const cmv::CircleAtom& a : m.atoms()) {
    REQUIRE(a.theta >= band.lo - slack);
    REQUIRE(a.theta <= band.hi + slack);
  }
  // periodic family has the two-arc structure, symmetric about pi
  const ZeroSetArcs zp = zero_set(kPer, kExact, grid, 10000, 5e-3, 2);
  REQUIRE(zp.arcs.size() == 2);
  CHECK(angle_gap(zp.arcs[0].lo, cmv::kTwoPi - zp.arcs[1].hi) <= slack);
}

TEST_CASE("zero set: parameter validation") {
  CHECK_THROWS_AS(zero_set(kFree, kExact, 8, 100, 5e-3, 2), cmv::ConfigError);
  CHECK_THROWS_AS(zero_set(kFree, kExact, 64, 100, 0.0, 2), cmv::ConfigError);
}
