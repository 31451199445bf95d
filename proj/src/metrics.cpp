#include "sqgate/metrics.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>

namespace sqgate {

namespace {

constexpr double kPurityTolerance = 1e-6;

void require_modes(const GaussianState& state, std::size_t n, const char* what) {
  if (state.n_modes() != n) throw std::invalid_argument(what);
}

struct WignerParams {
  Eigen::Vector2d mean;
  Eigen::Matrix2d inv;
  double norm;
};

WignerParams wigner_params(const GaussianState& state) {
  require_modes(state, 1, "Wigner function needs a single-mode state");
  const Eigen::Matrix2d v = state.cov();
  return {state.mean(), v.inverse(), 1.0 / (2.0 * std::numbers::pi * std::sqrt(v.determinant()))};
}

inline double eval(const WignerParams& w, double x, double p) {
  const double dx = x - w.mean(0);
  const double dp = p - w.mean(1);
  const double q = w.inv(0, 0) * dx * dx + 2.0 * w.inv(0, 1) * dx * dp + w.inv(1, 1) * dp * dp;
  return w.norm * std::exp(-0.5 * q);
}

void finish(WignerField& field, const std::vector<double>& row_sums) {
  double total = 0.0;
  for (double s : row_sums) total += s;
  field.riemann_sum = total * field.grid.step * field.grid.step;
  field.coverage_warning = std::abs(field.riemann_sum - 1.0) > 1e-3;
}

}  // namespace

std::size_t GridSpec::nx() const {
  return static_cast<std::size_t>(std::llround((x_max - x_min) / step)) + 1;
}

std::size_t GridSpec::np() const {
  return static_cast<std::size_t>(std::llround((p_max - p_min) / step)) + 1;
}

void GridSpec::validate() const {
  if (!(step > 0.0) || !(x_max > x_min) || !(p_max > p_min)) {
    throw std::invalid_argument("grid needs positive step and non-empty ranges");
  }
}

double variance_to_db(double variance) { return 10.0 * std::log10(variance / kVacuumVariance); }

FidelityReport fidelity(const GaussianState& target, const GaussianState& actual) {
  require_modes(target, 1, "fidelity target must be a single mode");
  require_modes(actual, 1, "fidelity state must be a single mode");
  if (std::abs(symplectic_eigenvalues(target.cov()).front() - kVacuumVariance) > kPurityTolerance) {
    throw std::invalid_argument("target not pure");
  }
  const Eigen::Matrix2d sigma = target.cov() + actual.cov();
  const double det = sigma.determinant();
  if (!(det > 0.0)) throw std::domain_error("singular overlap covariance");
  const Eigen::Vector2d delta = target.mean() - actual.mean();
  FidelityReport report;
  report.covariance_factor = 1.0 / std::sqrt(det);
  report.mean_factor = std::exp(-0.5 * delta.dot(sigma.inverse() * delta));
  report.fidelity = report.covariance_factor * report.mean_factor;
  return report;
}

SqueezingReport squeezing_db(const GaussianState& state) {
  require_modes(state, 1, "squeezing report needs a single-mode state");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(state.cov());
  const Eigen::Vector2d minor = solver.eigenvectors().col(0);
  double angle = std::atan2(minor(1), minor(0));
  if (std::abs(solver.eigenvalues()(1) - solver.eigenvalues()(0)) < 1e-12) angle = 0.0;
  angle = std::fmod(angle, std::numbers::pi);
  if (angle < 0.0) angle += std::numbers::pi;
  if (angle >= std::numbers::pi - 1e-15) angle = 0.0;
  return {variance_to_db(solver.eigenvalues()(0)), variance_to_db(solver.eigenvalues()(1)), angle};
}

double wigner_value(const GaussianState& state, double x, double p) {
  return eval(wigner_params(state), x, p);
}

WignerField wigner(const GaussianState& state, const GridSpec& grid) {
  grid.validate();
  const WignerParams w = wigner_params(state);
  WignerField field{grid, std::vector<double>(grid.nx() * grid.np()), 0.0, false};
  const std::size_t nx = grid.nx();
  const auto np = static_cast<std::int64_t>(grid.np());
  std::vector<double> row_sums(grid.np(), 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < np; ++j) {
    const auto row = static_cast<std::size_t>(j);
    const double p = grid.p(row);
    double sum = 0.0;
    for (std::size_t i = 0; i < nx; ++i) {
      const double v = eval(w, grid.x(i), p);
      field.values[row * nx + i] = v;
      sum += v;
    }
    row_sums[row] = sum;
  }
  finish(field, row_sums);
  return field;
}

WignerField wigner_serial(const GaussianState& state, const GridSpec& grid) {
  grid.validate();
  const WignerParams w = wigner_params(state);
  WignerField field{grid, std::vector<double>(grid.nx() * grid.np()), 0.0, false};
  std::vector<double> row_sums(grid.np(), 0.0);
  for (std::size_t j = 0; j < grid.np(); ++j) {
    for (std::size_t i = 0; i < grid.nx(); ++i) {
      const double v = eval(w, grid.x(i), grid.p(j));
      field.values[j * grid.nx() + i] = v;
      row_sums[j] += v;
    }
  }
  finish(field, row_sums);
  return field;
}

std::pair<double, double> epr_quality(const GaussianState& state) {
  require_modes(state, 2, "EPR quality needs a two-mode state");
  const Matrix& v = state.cov();
  const double sum_x = v(0, 0) + v(2, 2) + 2.0 * v(0, 2);
  const double diff_p = v(1, 1) + v(3, 3) - 2.0 * v(1, 3);
  return {10.0 * std::log10(sum_x), 10.0 * std::log10(diff_p)};
}

double quadrature_power_db(const GaussianState& state, double theta) {
  require_modes(state, 1, "quadrature power needs a single-mode state");
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const Eigen::Vector2d mu = state.mean();
  const Eigen::Matrix2d v = state.cov();
  const double mean = c * mu(0) + s * mu(1);
  const double var = c * c * v(0, 0) + s * s * v(1, 1) + 2.0 * s * c * v(0, 1);
  return variance_to_db(var + mean * mean);
}

}  // namespace sqgate
