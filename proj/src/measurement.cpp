#include "sqgate/measurement.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sqgate {

namespace {

constexpr double kDegenerateVariance = 1e-12;

Vector quadrature_row(std::size_t n_modes, std::size_t mode, double lo_phase) {
  Vector row = Vector::Zero(static_cast<Eigen::Index>(2 * n_modes));
  row(static_cast<Eigen::Index>(2 * mode)) = std::cos(lo_phase);
  row(static_cast<Eigen::Index>(2 * mode + 1)) = std::sin(lo_phase);
  return row;
}

}  // namespace

double normalize_lo_phase(double theta) {
  double t = std::fmod(theta, std::numbers::pi);
  if (t < 0.0) t += std::numbers::pi;
  if (t >= std::numbers::pi) t = 0.0;
  return t;
}

ShotRng::ShotRng(std::uint64_t seed, std::uint64_t shot_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(shot_index),
                    static_cast<std::uint32_t>(shot_index >> 32)};
  engine_.seed(seq);
}

double ShotRng::normal() { return normal_(engine_); }

std::pair<double, double> quadrature_marginal(const GaussianState& state, std::size_t mode,
                                              double lo_phase) {
  const Eigen::Vector2d mu = state.mode_mean(mode);
  const Eigen::Matrix2d v = state.mode_cov(mode);
  const double c = std::cos(lo_phase);
  const double s = std::sin(lo_phase);
  const double mean = c * mu(0) + s * mu(1);
  const double var = c * c * v(0, 0) + s * s * v(1, 1) + 2.0 * s * c * v(0, 1);
  return {mean, var};
}

GaussianState homodyne_condition(const GaussianState& state, std::size_t mode, double lo_phase,
                                 double outcome) {
  const std::size_t n = state.n_modes();
  if (n < 2) throw std::invalid_argument("conditioning needs at least two modes");
  if (mode >= n) throw std::out_of_range("measured mode out of range");

  const Vector a = quadrature_row(n, mode, lo_phase);
  const double var_a = a.dot(state.cov() * a);
  if (!(var_a > kDegenerateVariance)) throw std::domain_error("degenerate quadrature");
  const double mean_a = a.dot(state.mean());

  // Indices of the quadratures that survive the measurement.
  const auto dim_b = static_cast<Eigen::Index>(2 * (n - 1));
  Eigen::VectorXi keep(dim_b);
  for (Eigen::Index k = 0, out = 0; k < static_cast<Eigen::Index>(2 * n); ++k) {
    if (k / 2 != static_cast<Eigen::Index>(mode)) keep(out++) = static_cast<int>(k);
  }

  const Vector cross_full = state.cov() * a;
  Vector cross(dim_b);
  Vector mean_b(dim_b);
  Matrix cov_b(dim_b, dim_b);
  for (Eigen::Index r = 0; r < dim_b; ++r) {
    cross(r) = cross_full(keep(r));
    mean_b(r) = state.mean()(keep(r));
    for (Eigen::Index c = 0; c < dim_b; ++c) cov_b(r, c) = state.cov()(keep(r), keep(c));
  }

  // Schur complement of the scalar measured variance.
  mean_b += cross * ((outcome - mean_a) / var_a);
  cov_b -= cross * cross.transpose() / var_a;
  return GaussianState(std::move(mean_b), std::move(cov_b));
}

std::pair<HomodyneOutcome, std::optional<GaussianState>> homodyne_sample(
    const GaussianState& state, std::size_t mode, double lo_phase, ShotRng& rng) {
  const double phase = normalize_lo_phase(lo_phase);
  const auto [mean, var] = quadrature_marginal(state, mode, phase);
  if (!(var > kDegenerateVariance)) throw std::domain_error("degenerate quadrature");
  const double value = mean + std::sqrt(var) * rng.normal();
  HomodyneOutcome outcome{mode, phase, value};
  if (state.n_modes() == 1) return {outcome, std::nullopt};
  return {outcome, homodyne_condition(state, mode, phase, value)};
}

}  // namespace sqgate
