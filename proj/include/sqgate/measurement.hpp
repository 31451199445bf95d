#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <utility>

#include "sqgate/gaussian.hpp"

namespace sqgate {

struct HomodyneOutcome {
  std::size_t mode = 0;
  double lo_phase = 0.0;  // normalized to [0, pi)
  double value = 0.0;
};

/// Maps an LO phase into [0, pi). Measuring at theta + pi reads the same
/// observable with opposite sign, so callers that normalize must flip values.
double normalize_lo_phase(double theta);

/// Random stream for one Monte Carlo shot, derived from (seed, shot_index)
/// alone so the result of a shot never depends on which thread ran it.
class ShotRng {
 public:
  ShotRng(std::uint64_t seed, std::uint64_t shot_index);
  double normal();
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Mean and variance of the quadrature cos(theta) X + sin(theta) P of `mode`.
std::pair<double, double> quadrature_marginal(const GaussianState& state, std::size_t mode,
                                              double lo_phase);

/// State of the remaining modes after a homodyne measurement of `mode` at
/// `lo_phase` returned `outcome`. Throws "degenerate quadrature" when the
/// measured variance is below 1e-12.
GaussianState homodyne_condition(const GaussianState& state, std::size_t mode, double lo_phase,
                                 double outcome);

/// Draws an outcome from the exact Gaussian marginal and conditions on it.
/// The post-measurement state is empty when the last mode was measured.
std::pair<HomodyneOutcome, std::optional<GaussianState>> homodyne_sample(
    const GaussianState& state, std::size_t mode, double lo_phase, ShotRng& rng);

}  // namespace sqgate
