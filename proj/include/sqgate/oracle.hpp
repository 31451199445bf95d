#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "sqgate/gaussian.hpp"
#include "sqgate/metrics.hpp"

namespace sqgate {

inline constexpr double kOracleTolerance = 1e-4;

struct OracleVerdict {
  double closed_form = 0.0;
  double brute_force = 0.0;
  double abs_diff = 0.0;
  double tolerance = kOracleTolerance;
  bool pass = false;

  static OracleVerdict compare(double closed_form, double brute_force, double tolerance);
};

struct NamedVerdict {
  std::string name;
  OracleVerdict verdict;
};

/// Smallest grid (at `step`) that holds the overlap integrand of the two
/// single-mode states out to `n_sigma` standard deviations on both axes.
GridSpec covering_grid(const GaussianState& a, const GaussianState& b, double n_sigma = 6.0,
                       double step = 0.05);

/// Throws when the grid does not reach 6 sigma of the overlap integrand.
void require_coverage(const GaussianState& a, const GaussianState& b, const GridSpec& grid);

/// 2π ∬ W_a W_b dx dp by Riemann sum. Rows run in parallel; row sums are
/// combined in a fixed pairwise order, so the value is thread-count independent.
double overlap_integral(const GaussianState& a, const GaussianState& b, const GridSpec& grid);

/// Single-threaded reference for overlap_integral.
double overlap_integral_serial(const GaussianState& a, const GaussianState& b,
                               const GridSpec& grid);

/// Grid-integrated overlap of a pure state with `actual`, checked against the
/// closed-form fidelity at kOracleTolerance.
OracleVerdict wigner_overlap_fidelity(const GaussianState& pure, const GaussianState& actual,
                                      const GridSpec& grid);

/// Convenience overload on covering_grid(pure, actual).
OracleVerdict wigner_overlap_fidelity(const GaussianState& pure, const GaussianState& actual);

/// Gate at R = 1/2 on vacuum with the given EPR level, versus the textbook
/// teleportation value 1 / (1 + 10^{-dB/10}); 0.5 without entanglement.
OracleVerdict classical_bound_check(double epr_db = 0.0);

/// Random pure target and physical (generally mixed) state: squeezing up to
/// 12 dB, displacement up to 3 per quadrature, random orientation.
std::pair<GaussianState, GaussianState> random_state_pair(std::mt19937_64& rng);

/// Everything `validate` runs: classical bounds, analytic special cases, the
/// gate goldens and `n_random` randomized pairs.
std::vector<NamedVerdict> validation_suite(std::uint64_t seed, std::size_t n_random = 50);

}  // namespace sqgate
