#pragma once

#include <filesystem>
#include <vector>

#include "sqgate/dataset.hpp"
#include "sqgate/gaussian.hpp"

namespace sqgate {

inline constexpr std::size_t kMinPhases = 3;
inline constexpr std::size_t kMinShotsPerPhase = 100;

/// Moment statistics of the shots taken at one LO phase.
struct PhaseMoments {
  double lo_phase = 0.0;
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
};

/// Reconstructed single-mode state with one-sigma standard errors.
struct Reconstruction {
  GaussianState state = vacuum(1);
  Eigen::Vector2d mean_stderr = Eigen::Vector2d::Zero();
  double stderr_xx = 0.0;
  double stderr_pp = 0.0;
  double stderr_xp = 0.0;
  bool projected = false;  // covariance rescaled onto the physical boundary
  std::vector<PhaseMoments> phases;
};

/// Per-phase sample moments, ordered by first appearance of each phase.
std::vector<PhaseMoments> phase_moments(const HomodyneDataset& dataset);

/// Weighted least-squares fit of the quadrature means and variances,
///   m(θ) = cosθ μX + sinθ μP,
///   v(θ) = cos²θ VXX + sin²θ VPP + sin2θ VXP,
/// with v(θ) weighted by its standard error v(θ)·sqrt(2/n).
///
/// Estimates whose symplectic eigenvalue falls below 1/2 by less than three
/// standard errors are rescaled onto the boundary; larger violations throw
/// "unphysical reconstruction". Fewer than three distinct phases throw
/// "insufficient phases".
Reconstruction reconstruct(const HomodyneDataset& dataset);

/// n_sigma covariance ellipse around the mean, sampled at `points` angles.
std::vector<Eigen::Vector2d> ellipse(const GaussianState& state, double n_sigma,
                                     std::size_t points = 256);

/// `shot_index,lo_phase_rad,value` CSV with 17 significant digits.
void write_dataset_csv(const HomodyneDataset& dataset, const std::filesystem::path& path);
HomodyneDataset read_dataset_csv(const std::filesystem::path& path);

/// Provenance sidecar (JSON) written next to a dataset.
void write_provenance_json(const HomodyneDataset& dataset, const std::filesystem::path& path);
DatasetProvenance read_provenance_json(const std::filesystem::path& path);

}  // namespace sqgate
