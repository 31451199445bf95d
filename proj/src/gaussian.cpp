#include "sqgate/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace sqgate {

namespace {

void check_mode(std::size_t n_modes, std::size_t mode) {
  if (mode >= n_modes) {
    throw std::out_of_range("mode index " + std::to_string(mode) + " out of range for " +
                            std::to_string(n_modes) + "-mode state");
  }
}

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

GaussianState::GaussianState(Vector mean, Matrix cov) : mean_(std::move(mean)) {
  if (mean_.size() == 0 || mean_.size() % 2 != 0) {
    throw std::invalid_argument("mean vector must have even, non-zero length");
  }
  if (cov.rows() != mean_.size() || cov.cols() != mean_.size()) {
    throw std::invalid_argument("covariance shape does not match mean vector");
  }
  if (!mean_.allFinite() || !cov.allFinite()) {
    throw std::invalid_argument("state contains non-finite entries");
  }
  cov_ = symmetrized(cov);
}

Eigen::Vector2d GaussianState::mode_mean(std::size_t mode) const {
  check_mode(n_modes(), mode);
  return mean_.segment<2>(2 * mode);
}

Eigen::Matrix2d GaussianState::mode_cov(std::size_t mode) const {
  check_mode(n_modes(), mode);
  return cov_.block<2, 2>(2 * mode, 2 * mode);
}

GaussianState GaussianState::reduced(std::size_t mode) const {
  return GaussianState(mode_mean(mode), mode_cov(mode));
}

SymplecticTransform SymplecticTransform::identity(std::size_t n_modes) {
  const auto dim = static_cast<Eigen::Index>(2 * n_modes);
  return {Matrix::Identity(dim, dim), Vector::Zero(dim)};
}

GaussianState SymplecticTransform::apply(const GaussianState& state) const {
  if (state.n_modes() != n_modes()) {
    throw std::invalid_argument("transform and state mode counts differ");
  }
  return GaussianState(matrix * state.mean() + displacement,
                       matrix * state.cov() * matrix.transpose());
}

bool SymplecticTransform::is_symplectic(double tol) const {
  const Matrix omega = symplectic_form(n_modes());
  return (matrix * omega * matrix.transpose() - omega).cwiseAbs().maxCoeff() <= tol;
}

SymplecticTransform SymplecticTransform::after(const SymplecticTransform& first) const {
  if (first.n_modes() != n_modes()) {
    throw std::invalid_argument("cannot compose transforms of different sizes");
  }
  return {matrix * first.matrix, matrix * first.displacement + displacement};
}

Matrix symplectic_form(std::size_t n_modes) {
  const auto dim = static_cast<Eigen::Index>(2 * n_modes);
  Matrix omega = Matrix::Zero(dim, dim);
  for (Eigen::Index k = 0; k < dim; k += 2) {
    omega(k, k + 1) = 1.0;
    omega(k + 1, k) = -1.0;
  }
  return omega;
}

std::vector<double> symplectic_eigenvalues(const Matrix& cov) {
  const std::size_t n = static_cast<std::size_t>(cov.rows() / 2);
  if (n == 1) {
    // Closed form avoids the general eigensolver for the common case.
    const double det = cov(0, 0) * cov(1, 1) - cov(0, 1) * cov(1, 0);
    return {std::sqrt(std::max(det, 0.0))};
  }
  // With S = V^{1/2}, A = S Ω S is antisymmetric and A Aᵀ has eigenvalues ν_k²,
  // each twice. Both decompositions are symmetric, so degenerate spectra
  // (several vacuum-like modes) stay well conditioned.
  Eigen::SelfAdjointEigenSolver<Matrix> vsolve(cov);
  const Vector root = vsolve.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Matrix s = vsolve.eigenvectors() * root.asDiagonal() * vsolve.eigenvectors().transpose();
  const Matrix a = s * symplectic_form(n) * s;
  Eigen::SelfAdjointEigenSolver<Matrix> asolve(a * a.transpose(), Eigen::EigenvaluesOnly);
  const Vector squares = asolve.eigenvalues();  // ascending
  std::vector<double> nus;
  nus.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto i = static_cast<Eigen::Index>(2 * k);
    nus.push_back(std::sqrt(std::max(0.5 * (squares(i) + squares(i + 1)), 0.0)));
  }
  return nus;
}

bool is_physical(const GaussianState& state, double tol) {
  const auto nus = symplectic_eigenvalues(state.cov());
  return nus.front() >= kVacuumVariance - tol;
}

double db_to_squeezing(double db) { return db * std::numbers::ln10 / 20.0; }

SymplecticTransform squeezer(std::size_t n_modes, std::size_t mode, double r, double phi) {
  check_mode(n_modes, mode);
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  Eigen::Matrix2d rot;
  rot << c, -s, s, c;
  const Eigen::Matrix2d block =
      rot * Eigen::Vector2d(std::exp(-r), std::exp(r)).asDiagonal() * rot.transpose();
  auto t = SymplecticTransform::identity(n_modes);
  t.matrix.block<2, 2>(2 * mode, 2 * mode) = block;
  return t;
}

SymplecticTransform rotation(std::size_t n_modes, std::size_t mode, double theta) {
  check_mode(n_modes, mode);
  auto t = SymplecticTransform::identity(n_modes);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  t.matrix.block<2, 2>(2 * mode, 2 * mode) << c, -s, s, c;
  return t;
}

SymplecticTransform beamsplitter_transform(std::size_t n_modes, std::size_t i, std::size_t j,
                                           double reflectivity) {
  check_mode(n_modes, i);
  check_mode(n_modes, j);
  if (i == j) throw std::invalid_argument("beam splitter needs two distinct modes");
  if (!(reflectivity > 0.0 && reflectivity < 1.0)) {
    throw std::invalid_argument("beam splitter reflectivity must lie in (0, 1), got " +
                                std::to_string(reflectivity));
  }
  const double a = std::sqrt(reflectivity);
  const double b = std::sqrt(1.0 - reflectivity);
  auto t = SymplecticTransform::identity(n_modes);
  for (std::size_t q = 0; q < 2; ++q) {
    const auto ii = static_cast<Eigen::Index>(2 * i + q);
    const auto jj = static_cast<Eigen::Index>(2 * j + q);
    t.matrix(ii, ii) = a;
    t.matrix(ii, jj) = b;
    t.matrix(jj, ii) = b;
    t.matrix(jj, jj) = -a;
  }
  return t;
}

SymplecticTransform displacement(std::size_t n_modes, std::size_t mode, double dx, double dp) {
  check_mode(n_modes, mode);
  auto t = SymplecticTransform::identity(n_modes);
  t.displacement(static_cast<Eigen::Index>(2 * mode)) = dx;
  t.displacement(static_cast<Eigen::Index>(2 * mode + 1)) = dp;
  return t;
}

GaussianState vacuum(std::size_t n_modes) {
  if (n_modes == 0) throw std::invalid_argument("invalid mode count 0");
  const auto dim = static_cast<Eigen::Index>(2 * n_modes);
  return GaussianState(Vector::Zero(dim), kVacuumVariance * Matrix::Identity(dim, dim));
}

GaussianState tensor(const GaussianState& first, const GaussianState& second) {
  const auto a = first.mean().size();
  const auto b = second.mean().size();
  Vector mean(a + b);
  mean << first.mean(), second.mean();
  Matrix cov = Matrix::Zero(a + b, a + b);
  cov.topLeftCorner(a, a) = first.cov();
  cov.bottomRightCorner(b, b) = second.cov();
  return GaussianState(std::move(mean), std::move(cov));
}

GaussianState squeeze(const GaussianState& state, std::size_t mode, double r, double phi) {
  return squeezer(state.n_modes(), mode, r, phi).apply(state);
}

GaussianState beamsplitter(const GaussianState& state, std::size_t i, std::size_t j,
                           double reflectivity) {
  return beamsplitter_transform(state.n_modes(), i, j, reflectivity).apply(state);
}

GaussianState rotate(const GaussianState& state, std::size_t mode, double theta) {
  return rotation(state.n_modes(), mode, theta).apply(state);
}

GaussianState displace(const GaussianState& state, std::size_t mode, double dx, double dp) {
  check_mode(state.n_modes(), mode);
  Vector mean = state.mean();
  mean(static_cast<Eigen::Index>(2 * mode)) += dx;
  mean(static_cast<Eigen::Index>(2 * mode + 1)) += dp;
  return GaussianState(std::move(mean), state.cov());
}

GaussianState loss(const GaussianState& state, std::size_t mode, double eta) {
  check_mode(state.n_modes(), mode);
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw std::invalid_argument("loss transmission must lie in [0, 1], got " + std::to_string(eta));
  }
  const auto k = static_cast<Eigen::Index>(2 * mode);
  const double t = std::sqrt(eta);
  Vector mean = state.mean();
  Matrix cov = state.cov();
  mean.segment<2>(k) *= t;
  // Rows and columns of the lossy mode scale by sqrt(eta); its own block picks up vacuum noise.
  cov.middleRows(k, 2) *= t;
  cov.middleCols(k, 2) *= t;
  cov.block<2, 2>(k, k) += (1.0 - eta) * kVacuumVariance * Eigen::Matrix2d::Identity();
  return GaussianState(std::move(mean), std::move(cov));
}

GaussianState epr_pair(double entanglement_db) {
  if (!(entanglement_db >= 0.0) || !std::isfinite(entanglement_db)) {
    throw std::invalid_argument("EPR entanglement must be a finite, non-negative dB value");
  }
  const double r = db_to_squeezing(entanglement_db);
  auto state = vacuum(2);
  state = squeeze(state, 0, r, 0.0);
  state = squeeze(state, 1, r, std::numbers::pi / 2);
  return beamsplitter(state, 0, 1, 0.5);
}

}  // namespace sqgate
