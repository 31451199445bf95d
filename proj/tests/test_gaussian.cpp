#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "sqgate/gaussian.hpp"
#include "test_support.hpp"

using namespace sqgate;
using sqgate::testing::max_abs_diff;
using sqgate::testing::random_state;

namespace {

// <Δ(X1+X2)^2> and <Δ(P1-P2)^2> straight from the covariance entries.
std::pair<double, double> epr_variances(const GaussianState& s) {
  const Matrix& v = s.cov();
  return {v(0, 0) + v(2, 2) + 2 * v(0, 2), v(1, 1) + v(3, 3) - 2 * v(1, 3)};
}

}  // namespace

TEST_CASE("vacuum baseline") {
  const auto v1 = vacuum(1);
  CHECK(v1.n_modes() == 1);
  CHECK(v1.mean().isZero());
  CHECK(v1.cov()(0, 0) == 0.5);
  CHECK(v1.cov()(1, 1) == 0.5);
  CHECK(v1.cov()(0, 1) == 0.0);

  const auto v3 = vacuum(3);
  CHECK(v3.mean().size() == 6);
  CHECK(v3.cov().rows() == 6);
  CHECK(max_abs_diff(v3.cov(), 0.5 * Matrix::Identity(6, 6)) == 0.0);

  CHECK_THROWS_AS(vacuum(0), std::invalid_argument);
}

TEST_CASE("squeeze") {
  SUBCASE("10 dB") {
    const auto s = squeeze(vacuum(1), 0, db_to_squeezing(10.0));
    CHECK(s.cov()(0, 0) == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(s.cov()(1, 1) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(std::abs(s.cov()(0, 1)) < 1e-15);
  }
  SUBCASE("13.8 dB source") {
    const auto s = squeeze(vacuum(1), 0, db_to_squeezing(13.8));
    CHECK(s.cov()(0, 0) == doctest::Approx(0.5 * std::pow(10.0, -1.38)).epsilon(1e-12));
    CHECK(s.cov()(0, 0) == doctest::Approx(0.020844).epsilon(1e-4));
  }
  SUBCASE("r = 0 is the identity") {
    std::mt19937_64 rng(1);
    const auto st = random_state(rng, 2);
    const auto out = squeeze(st, 1, 0.0, 0.3);
    CHECK(max_abs_diff(out.cov(), st.cov()) < 1e-15);
    CHECK(max_abs_diff(out.mean(), st.mean()) < 1e-15);
  }
  SUBCASE("angle pi/2 squeezes P") {
    const auto s = squeeze(vacuum(1), 0, db_to_squeezing(10.0), std::numbers::pi / 2);
    CHECK(s.cov()(0, 0) == doctest::Approx(5.0));
    CHECK(s.cov()(1, 1) == doctest::Approx(0.05));
  }
  CHECK_THROWS_AS(squeeze(vacuum(1), 1, 0.1), std::out_of_range);
}

TEST_CASE("beamsplitter") {
  SUBCASE("vacuum invariance") {
    for (double r : {0.5, 0.99, 0.01}) {
      const auto s = beamsplitter(vacuum(2), 0, 1, r);
      CHECK(max_abs_diff(s.cov(), vacuum(2).cov()) < 1e-15);
    }
  }
  SUBCASE("displaced input against a brute-force 2x2 multiply") {
    const double d = 1.7;
    const double r = 0.5;
    const auto s = beamsplitter(displace(vacuum(2), 0, d, 0.0), 0, 1, r);
    // [out_i; out_j] = [[sqrt R, sqrt(1-R)], [sqrt(1-R), -sqrt R]] [in_i; in_j]
    const double a = std::sqrt(r), b = std::sqrt(1 - r);
    const double out_i = a * d + b * 0.0;
    const double out_j = b * d - a * 0.0;
    CHECK(s.mean()(0) == doctest::Approx(out_i));
    CHECK(s.mean()(2) == doctest::Approx(out_j));
    CHECK(out_i == doctest::Approx(d / std::sqrt(2.0)));
    CHECK(out_j == doctest::Approx(d / std::sqrt(2.0)));
  }
  SUBCASE("convention on the second input") {
    const auto s = beamsplitter(displace(vacuum(2), 1, 0.0, 1.0), 0, 1, 0.3);
    CHECK(s.mean()(1) == doctest::Approx(std::sqrt(0.7)));
    CHECK(s.mean()(3) == doctest::Approx(-std::sqrt(0.3)));
  }
  SUBCASE("rejected arguments") {
    CHECK_THROWS_AS(beamsplitter(vacuum(2), 0, 1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(beamsplitter(vacuum(2), 0, 1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(beamsplitter(vacuum(2), 0, 0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(beamsplitter(vacuum(2), 0, 2, 0.5), std::out_of_range);
  }
  SUBCASE("photon number conserved") {
    std::mt19937_64 rng(7);
    const auto st = random_state(rng, 2);
    const auto out = beamsplitter(st, 0, 1, 0.37);
    const double n_in = st.cov().trace() + st.mean().squaredNorm();
    const double n_out = out.cov().trace() + out.mean().squaredNorm();
    CHECK(n_out == doctest::Approx(n_in).epsilon(1e-12));
  }
}

TEST_CASE("rotate") {
  const double d = 2.0;
  const auto f = rotate(displace(vacuum(1), 0, 0.0, d), 0, std::numbers::pi / 2);
  CHECK(f.mean()(0) == doctest::Approx(-d));
  CHECK(std::abs(f.mean()(1)) < 1e-15);

  std::mt19937_64 rng(3);
  const auto st = random_state(rng, 1);
  const auto full = rotate(st, 0, 2 * std::numbers::pi);
  CHECK(max_abs_diff(full.cov(), st.cov()) < 1e-12);
  CHECK(max_abs_diff(full.mean(), st.mean()) < 1e-12);

  const auto sq = squeeze(vacuum(1), 0, db_to_squeezing(10.0));
  const auto ex = rotate(sq, 0, std::numbers::pi / 2);
  CHECK(ex.cov()(0, 0) == doctest::Approx(5.0));
  CHECK(ex.cov()(1, 1) == doctest::Approx(0.05));
}

TEST_CASE("displace") {
  const double a = std::sqrt(4.5);
  const auto c = displace(vacuum(1), 0, a, 0.0);
  CHECK(c.mean()(0) == doctest::Approx(a));
  CHECK(max_abs_diff(c.cov(), vacuum(1).cov()) == 0.0);

  std::mt19937_64 rng(5);
  const auto st = random_state(rng, 2);
  const auto back = displace(displace(st, 1, 0.3, -1.2), 1, -0.3, 1.2);
  CHECK(max_abs_diff(back.mean(), st.mean()) < 1e-15);

  const auto p = displace(vacuum(1), 0, 0.0, a);
  const double power = p.cov()(1, 1) + p.mean()(1) * p.mean()(1);
  CHECK(power == doctest::Approx(5.0));
  CHECK(10 * std::log10(power / 0.5) == doctest::Approx(10.0));
}

TEST_CASE("loss") {
  std::mt19937_64 rng(11);
  const auto st = random_state(rng, 2);
  const auto same = loss(st, 0, 1.0);
  CHECK(max_abs_diff(same.cov(), st.cov()) < 1e-15);

  const auto gone = loss(st, 1, 0.0);
  CHECK(max_abs_diff(Matrix(gone.mode_cov(1)), 0.5 * Matrix::Identity(2, 2)) < 1e-15);
  CHECK(gone.mode_mean(1).isZero());
  CHECK(std::abs(gone.cov()(0, 2)) < 1e-15);

  CHECK_THROWS_AS(loss(st, 0, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(loss(st, 0, 1.1), std::invalid_argument);

  SUBCASE("13.8 dB sources degraded to a 12 dB EPR pair") {
    // Solve eta 10^-1.38 + (1 - eta) = 10^-1.2 for eta.
    const double eta = (1 - std::pow(10.0, -1.2)) / (1 - std::pow(10.0, -1.38));
    CHECK(eta == doctest::Approx(0.97766).epsilon(1e-5));
    const auto sq = loss(squeeze(vacuum(1), 0, db_to_squeezing(13.8)), 0, eta);
    CHECK(sq.cov()(0, 0) == doctest::Approx(0.031548).epsilon(1e-4));
    CHECK(sq.cov()(0, 0) == doctest::Approx(0.5 * std::pow(10.0, -1.2)).epsilon(1e-12));

    auto pair = tensor(squeeze(vacuum(1), 0, db_to_squeezing(13.8), 0.0),
                       squeeze(vacuum(1), 0, db_to_squeezing(13.8), std::numbers::pi / 2));
    pair = loss(loss(pair, 0, eta), 1, eta);
    pair = beamsplitter(pair, 0, 1, 0.5);
    const auto [sx, dp] = epr_variances(pair);
    CHECK(10 * std::log10(sx) == doctest::Approx(-12.0).epsilon(1e-10));
    CHECK(10 * std::log10(dp) == doctest::Approx(-12.0).epsilon(1e-10));
  }
}

TEST_CASE("epr_pair") {
  for (double db : {0.0, 3.0, 6.0, 12.0, 20.0}) {
    const auto [sx, dp] = epr_variances(epr_pair(db));
    CHECK(std::abs(sx - std::pow(10.0, -db / 10)) < 1e-12);
    CHECK(std::abs(dp - std::pow(10.0, -db / 10)) < 1e-12);
  }
  const auto e12 = epr_pair(12.0);
  CHECK(epr_variances(e12).first == doctest::Approx(0.063096).epsilon(1e-5));
  // Marginals: cosh(2r)/2, brute-force from the construction.
  const double r = db_to_squeezing(12.0);
  CHECK(e12.cov()(0, 0) == doctest::Approx(std::cosh(2 * r) / 2));
  CHECK(e12.cov()(0, 0) == doctest::Approx(3.978).epsilon(1e-3));
  CHECK(e12.cov()(2, 2) == doctest::Approx(3.978).epsilon(1e-3));
  CHECK(e12.cov()(0, 2) == doctest::Approx(-std::sinh(2 * r) / 2));
  CHECK(e12.cov()(1, 3) == doctest::Approx(std::sinh(2 * r) / 2));

  const auto [v0x, v0p] = epr_variances(epr_pair(0.0));
  CHECK(v0x == doctest::Approx(1.0));
  CHECK(v0p == doctest::Approx(1.0));
  CHECK_THROWS_AS(epr_pair(-1.0), std::invalid_argument);
}

TEST_CASE("symplectic eigenvalues") {
  for (double nu : symplectic_eigenvalues(vacuum(3).cov())) CHECK(nu == doctest::Approx(0.5).epsilon(1e-12));
  const auto pure = epr_pair(12.0);
  for (double nu : symplectic_eigenvalues(pure.cov())) CHECK(nu == doctest::Approx(0.5).epsilon(1e-9));
  const auto thermal = GaussianState(Vector::Zero(2), 1.5 * Matrix::Identity(2, 2));
  CHECK(symplectic_eigenvalues(thermal.cov()).front() == doctest::Approx(1.5));
  const auto bad = GaussianState(Vector::Zero(2), 0.2 * Matrix::Identity(2, 2));
  CHECK_FALSE(is_physical(bad));
}

TEST_CASE("property: random operation chains stay symmetric and physical") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> op(0, 4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + trial % 4;
    GaussianState s = vacuum(n);
    std::uniform_int_distribution<std::size_t> mode(0, n - 1);
    for (int step = 0; step < 20; ++step) {
      const std::size_t m = mode(rng);
      const double trace_before = s.cov().trace();
      switch (op(rng)) {
        case 0: s = squeeze(s, m, 1.5 * u(rng) - 0.5, 2 * std::numbers::pi * u(rng)); break;
        case 1: s = rotate(s, m, 2 * std::numbers::pi * u(rng));
                CHECK(s.cov().trace() == doctest::Approx(trace_before).epsilon(1e-10));
                break;
        case 2: s = displace(s, m, u(rng) - 0.5, u(rng) - 0.5); break;
        case 3: s = loss(s, m, u(rng)); break;
        default:
          if (n > 1) {
            const std::size_t k = (m + 1) % n;
            s = beamsplitter(s, m, k, 0.02 + 0.96 * u(rng));
            CHECK(std::abs(s.cov().trace() - trace_before) <= 1e-10 * std::max(1.0, trace_before));
          }
      }
      CHECK(max_abs_diff(s.cov(), s.cov().transpose()) <= 1e-10);
      CHECK(is_physical(s));
    }
  }
}

TEST_CASE("property: squeeze(r) then squeeze(-r) is the identity") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const auto st = random_state(rng, 2);
    const double r = 1.2 * u(rng);
    const double phi = 3.0 * u(rng);
    const auto back = squeeze(squeeze(st, 1, r, phi), 1, -r, phi);
    CHECK(max_abs_diff(back.cov(), st.cov()) < 1e-10);
    CHECK(max_abs_diff(back.mean(), st.mean()) < 1e-10);
  }
}

TEST_CASE("property: transform composition matches sequential application") {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const std::size_t n = 3;
    const auto st = random_state(rng, n);
    const auto t1 = squeezer(n, 0, u(rng), 3 * u(rng));
    const auto t2 = beamsplitter_transform(n, 0, 2, 0.1 + 0.8 * u(rng));
    const auto t3 = displacement(n, 1, u(rng), -u(rng));
    const auto t4 = rotation(n, 2, 6 * u(rng));
    for (const auto* t : {&t1, &t2, &t3, &t4}) CHECK(t->is_symplectic());
    const auto composed = t4.after(t3).after(t2).after(t1);
    CHECK(composed.is_symplectic());
    const auto seq = t4.apply(t3.apply(t2.apply(t1.apply(st))));
    const auto one = composed.apply(st);
    CHECK(max_abs_diff(seq.cov(), one.cov()) < 1e-10);
    CHECK(max_abs_diff(seq.mean(), one.mean()) < 1e-10);
  }
}

TEST_CASE("symplectic eigenvalues of degenerate multi-mode spectra") {
  for (std::size_t n = 2; n <= 5; ++n) {
    for (double nu : symplectic_eigenvalues(vacuum(n).cov())) CHECK(nu == doctest::Approx(0.5).epsilon(1e-12));
  }
  const GaussianState thermal(Vector::Zero(2), 1.5 * Matrix::Identity(2, 2));
  const auto mixed = beamsplitter(beamsplitter(tensor(thermal, vacuum(3)), 0, 2, 0.3), 1, 3, 0.6);
  const auto nus = symplectic_eigenvalues(mixed.cov());
  REQUIRE(nus.size() == 4);
  CHECK(nus[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(nus[2] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(nus[3] == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(is_physical(mixed));
}
