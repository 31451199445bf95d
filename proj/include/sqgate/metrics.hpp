#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "sqgate/gaussian.hpp"

namespace sqgate {

/// Overlap fidelity <psi|rho|psi> of a pure target with an arbitrary state,
/// split into its covariance and displacement factors.
struct FidelityReport {
  double fidelity = 0.0;
  double covariance_factor = 0.0;  // 1 / sqrt(det(V1 + V2))
  double mean_factor = 0.0;        // exp(-1/2 d^T (V1 + V2)^{-1} d)
};

struct SqueezingReport {
  double min_variance_db = 0.0;
  double max_variance_db = 0.0;
  double principal_angle = 0.0;  // orientation of the minor axis, [0, pi)
};

/// Rectangular phase-space grid; nodes at min + k * step up to and including max.
struct GridSpec {
  double x_min = -8.0;
  double x_max = 8.0;
  double p_min = -8.0;
  double p_max = 8.0;
  double step = 0.05;

  std::size_t nx() const;
  std::size_t np() const;
  double x(std::size_t i) const { return x_min + static_cast<double>(i) * step; }
  double p(std::size_t j) const { return p_min + static_cast<double>(j) * step; }
  void validate() const;
};

/// Wigner function sampled on a grid, row-major with p as the row index.
struct WignerField {
  GridSpec grid;
  std::vector<double> values;
  double riemann_sum = 0.0;
  bool coverage_warning = false;  // |riemann_sum - 1| > 1e-3

  double at(std::size_t ix, std::size_t jp) const { return values[jp * grid.nx() + ix]; }
};

/// Decibels relative to the vacuum quadrature variance.
double variance_to_db(double variance);

FidelityReport fidelity(const GaussianState& target, const GaussianState& actual);

SqueezingReport squeezing_db(const GaussianState& state);

/// Wigner density of a single-mode Gaussian state at one phase-space point.
double wigner_value(const GaussianState& state, double x, double p);

WignerField wigner(const GaussianState& state, const GridSpec& grid = {});
WignerField wigner_serial(const GaussianState& state, const GridSpec& grid = {});

/// 10 log10 of <Δ(X1+X2)^2> and <Δ(P1-P2)^2>, relative to the two-vacuum value 1.
std::pair<double, double> epr_quality(const GaussianState& state);

/// Total power <q^2> of the quadrature at angle theta relative to the vacuum, in dB.
double quadrature_power_db(const GaussianState& state, double theta);

}  // namespace sqgate
