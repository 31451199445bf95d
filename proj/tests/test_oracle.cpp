#include <cmath>
#include <limits>
#include <random>

#include <doctest.h>

#include "sqgate/oracle.hpp"
#include "sqgate/protocol.hpp"

using namespace sqgate;

TEST_CASE("overlap oracle on analytic special cases") {
  SUBCASE("vacuum with itself") {
    const auto v = wigner_overlap_fidelity(vacuum(1), vacuum(1));
    CHECK(v.pass);
    CHECK(v.brute_force == doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("vacuum against squeezed vacuum is 1 / cosh r") {
    const double r = std::log(10.0) / 2;  // e^{-2r} = 0.1
    const auto sq = squeeze(vacuum(1), 0, r);
    const double expected = 1.0 / std::cosh(r);
    CHECK(expected == doctest::Approx(0.574960).epsilon(1e-6));
    const auto v = wigner_overlap_fidelity(sq, vacuum(1));
    CHECK(v.pass);
    CHECK(v.closed_form == doctest::Approx(expected).epsilon(1e-12));
    CHECK(std::abs(v.brute_force - expected) < 1e-6);
  }
  SUBCASE("gate output at 10 dB / 12 dB") {
    const auto r = run_gate_analytic(gate_config_for_target(10.0, SqueezeAxis::amplitude, 12.0),
                                     vacuum(1));
    const auto v = wigner_overlap_fidelity(r.target, r.output);
    CHECK(v.pass);
    CHECK(v.brute_force == doctest::Approx(0.780572).epsilon(1e-5));
  }
}

TEST_CASE("classical and teleportation bounds") {
  const auto c0 = classical_bound_check(0.0);
  CHECK(c0.pass);
  CHECK(c0.closed_form == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(c0.tolerance == 1e-12);

  const auto c12 = classical_bound_check(12.0);
  CHECK(c12.pass);
  CHECK(c12.closed_form == doctest::Approx(0.94065).epsilon(1e-5));

  const auto inf = classical_bound_check(std::numeric_limits<double>::infinity());
  CHECK(inf.pass);
  CHECK(inf.closed_form == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("property: closed form matches the grid overlap on random pairs") {
  std::mt19937_64 rng(2718);
  for (int i = 0; i < 50; ++i) {
    const auto [pure, actual] = random_state_pair(rng);
    const auto v = wigner_overlap_fidelity(pure, actual);
    CAPTURE(i);
    CHECK(v.pass);
    CHECK(v.abs_diff < kOracleTolerance);
    CHECK(v.closed_form > 0.0);
    CHECK(v.closed_form <= 1.0 + 1e-12);
  }
}

TEST_CASE("grid refinement changes the overlap by less than 1e-5") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 5; ++i) {
    const auto [pure, actual] = random_state_pair(rng);
    const auto coarse = covering_grid(pure, actual, 6.0, 0.05);
    const auto fine = covering_grid(pure, actual, 6.0, 0.025);
    const double a = overlap_integral(pure, actual, coarse);
    const double b = overlap_integral(pure, actual, fine);
    CHECK(std::abs(a - b) < 1e-5);
  }
}

TEST_CASE("coverage is enforced") {
  const auto sq = displace(squeeze(vacuum(1), 0, 1.2, 0.4), 0, 2.0, -1.0);
  const auto grid = covering_grid(sq, vacuum(1));
  CHECK_NOTHROW(require_coverage(sq, vacuum(1), grid));
  const GridSpec narrow{-1.0, 1.0, -1.0, 1.0, 0.05};
  CHECK_THROWS_AS(require_coverage(sq, vacuum(1), narrow), std::invalid_argument);
  CHECK_THROWS_AS(wigner_overlap_fidelity(sq, vacuum(1), narrow), std::invalid_argument);
  CHECK_THROWS_AS(overlap_integral(vacuum(2), vacuum(1), grid), std::invalid_argument);
}

TEST_CASE("OracleVerdict::compare") {
  const auto ok = OracleVerdict::compare(0.5, 0.50001, 1e-4);
  CHECK(ok.pass);
  CHECK(ok.abs_diff == doctest::Approx(1e-5));
  CHECK_FALSE(OracleVerdict::compare(0.5, 0.6, 1e-4).pass);
  CHECK_FALSE(OracleVerdict::compare(0.5, std::numeric_limits<double>::quiet_NaN(), 1e-4).pass);
}

TEST_CASE("validation suite") {
  const auto suite = validation_suite(7, 50);
  CHECK(suite.size() == 3 + 1 + 2 + 3 + 50);
  for (const auto& v : suite) {
    CAPTURE(v.name);
    CHECK(v.verdict.pass);
  }
}
