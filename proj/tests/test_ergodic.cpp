#include <catch2/catch_amalgamated.hpp>

#include "cmv/ergodic.hpp"

using cmv::alpha_at;
using cmv::Complex;
using cmv::ErgodicFamily;
using cmv::expectation;
using cmv::initial_state;
using cmv::OmegaState;
using cmv::SamplingPlan;
using cmv::shifted;

namespace {

const double kGoldenFrac = 0.6180339887498949;

std::vector<ErgodicFamily> all_families() {
  return {ErgodicFamily::constant({0.5, 0.0}),
          ErgodicFamily::periodic({{0.3, 0.0}, {0.0, -0.4}}),
          ErgodicFamily::quasiperiodic(0.2, kGoldenFrac, 0.0),
          ErgodicFamily::random_iid(0.5, 42)};
}

}  // namespace

TEST_CASE("alpha_at: fixed examples") {
  const auto free_family = ErgodicFamily::constant({0.0, 0.0});
  CHECK(alpha_at(free_family, initial_state(free_family), 7) == Complex{0.0, 0.0});

  const auto per = ErgodicFamily::periodic({{0.3, 0.0}, {0.0, -0.4}});
  CHECK(alpha_at(per, initial_state(per), 3) == Complex{0.0, -0.4});
  CHECK(alpha_at(per, initial_state(per), -1) == Complex{0.0, -0.4});

  // quasiperiodic law checked two ways: direct formula vs repeated shifts
  const auto qp = ErgodicFamily::quasiperiodic(0.2, kGoldenFrac, 0.0);
  const Complex direct = 0.2 * cmv::unit_circle(cmv::kTwoPi * kGoldenFrac);
  CHECK(std::abs(alpha_at(qp, initial_state(qp), 1) - direct) < 1e-14);
  OmegaState s = initial_state(qp);
  for (int step = 0; step < 5; ++step) s = shifted(qp, s);
  CHECK(std::abs(alpha_at(qp, s, -4) - direct) < 1e-12);
}

TEST_CASE("alpha_at: cap bound holds on a window") {
  for (const ErgodicFamily& fam : all_families()) {
    const double cap = fam.cap();
    REQUIRE(cap < 1.0);
    const OmegaState s = initial_state(fam);
    for (int n = -200; n <= 200; ++n)
      REQUIRE(std::abs(alpha_at(fam, s, n)) <= cap + 1e-12);
  }
}

TEST_CASE("periodic with p=1 matches constant") {
  const auto c = ErgodicFamily::constant({0.2, 0.1});
  const auto p1 = ErgodicFamily::periodic({{0.2, 0.1}});
  for (int n = -8; n <= 8; ++n)
    CHECK(alpha_at(c, initial_state(c), n) == alpha_at(p1, initial_state(p1), n));
}

TEST_CASE("random_iid coefficients are counter-deterministic") {
  const auto f1 = ErgodicFamily::random_iid(0.5, 42);
  const auto f2 = ErgodicFamily::random_iid(0.5, 42);
  OmegaState s;
  s.stream = 3;
  // bit-identical without generating prefixes, any order
  const Complex late = alpha_at(f1, s, 1000);
  for (int n : {1000, -5, 0, 17, 1000})
    CHECK(alpha_at(f1, s, n) == alpha_at(f2, s, n));
  CHECK(alpha_at(f1, s, 1000) == late);
  // different stream or seed decorrelates
  OmegaState t = s;
  t.stream = 4;
  CHECK(alpha_at(f1, s, 0) != alpha_at(f1, t, 0));
  CHECK(alpha_at(ErgodicFamily::random_iid(0.5, 43), s, 0) != alpha_at(f1, s, 0));
}

TEST_CASE("shift consistency: alpha(S omega, n) = alpha(omega, n+1)") {
  for (const ErgodicFamily& fam : all_families()) {
    OmegaState s = initial_state(fam);
    s.stream = 2;
    const OmegaState sh = shifted(fam, s);
    for (int n = -50; n < 50; ++n)
      REQUIRE(std::abs(alpha_at(fam, sh, n) - alpha_at(fam, s, n + 1)) < 1e-12);
  }
}

TEST_CASE("expectation: exact periodic averages") {
  const auto c = ErgodicFamily::constant({0.5, 0.0});
  const auto plan = SamplingPlan::exact_periodic();
  const auto e1 = expectation(c, plan, [&](const OmegaState& s) {
    return Complex{std::norm(alpha_at(c, s, 0)), 0.0};
  });
  CHECK(e1.mean.real() == 0.25);
  CHECK(e1.count == 1);

  const auto per = ErgodicFamily::periodic({{0.3, 0.0}, {0.0, -0.4}});
  const auto e2 = expectation(per, plan, [&](const OmegaState& s) { return alpha_at(per, s, 0); });
  CHECK(std::abs(e2.mean - Complex{0.15, -0.2}) < 1e-15);
  CHECK(e2.count == 2);
}

TEST_CASE("expectation: uniform-disk second moment via Monte Carlo") {
  // E|alpha|^2 = radius^2 / 2 for the uniform area law
  const auto iid = ErgodicFamily::random_iid(0.5, 42);
  const auto plan = SamplingPlan::monte_carlo(10000, 1);
  const auto e = expectation(iid, plan, [&](const OmegaState& s) {
    return Complex{std::norm(alpha_at(iid, s, 0)), 0.0};
  });
  REQUIRE(e.std_error > 0.0);
  CHECK(std::abs(e.mean.real() - 0.125) < 3.0 * e.std_error);
}

TEST_CASE("expectation: exact plan rejected for aperiodic families") {
  const auto iid = ErgodicFamily::random_iid(0.5, 7);
  CHECK_THROWS_AS(expectation(iid, SamplingPlan::exact_periodic(),
                              [](const OmegaState&) { return Complex{}; }),
                  cmv::ConfigError);
}

TEST_CASE("monte carlo expectations are bit-reproducible") {
  const auto qp = ErgodicFamily::quasiperiodic(0.2, kGoldenFrac, 0.0);
  const auto plan = SamplingPlan::monte_carlo(512, 9);
  auto obs = [&](const OmegaState& s) { return alpha_at(qp, s, 3); };
  const auto a = expectation(qp, plan, obs);
  const auto b = expectation(qp, plan, obs);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
  const auto other = expectation(qp, SamplingPlan::monte_carlo(512, 10), obs);
  CHECK(a.mean != other.mean);
}

TEST_CASE("quasiperiodic Birkhoff averages of trig polynomials") {
  const auto qp = ErgodicFamily::quasiperiodic(0.2, kGoldenFrac, 0.0);
  OmegaState s = initial_state(qp);
  const int big_n = 100000;
  Complex sum1{}, sum2{};
  for (int j = 0; j < big_n; ++j) {
    sum1 += cmv::unit_circle(cmv::kTwoPi * s.phase);
    sum2 += cmv::unit_circle(2.0 * cmv::kTwoPi * s.phase);
    s = shifted(qp, s);
  }
  CHECK(std::abs(sum1) / big_n < 1e-2);
  CHECK(std::abs(sum2) / big_n < 1e-2);
}

TEST_CASE("family validation") {
  CHECK_THROWS_AS(ErgodicFamily::constant({1.0, 0.0}), cmv::ConfigError);
  CHECK_THROWS_AS(ErgodicFamily::periodic({}), cmv::ConfigError);
  CHECK_THROWS_AS(ErgodicFamily::quasiperiodic(0.2, 1.5, 0.0), cmv::ConfigError);
  CHECK_THROWS_AS(ErgodicFamily::random_iid(1.0, 1), cmv::ConfigError);
  CHECK_THROWS_AS(SamplingPlan::monte_carlo(0, 1), cmv::ConfigError);
}
