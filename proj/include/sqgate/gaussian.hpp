#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace sqgate {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Variance of a vacuum quadrature with hbar = 1 and [X, P] = i.
inline constexpr double kVacuumVariance = 0.5;

/// Tolerance used by the physicality check on symplectic eigenvalues.
inline constexpr double kPhysicalityTolerance = 1e-8;

/// Gaussian state of N bosonic modes.
///
/// Quadratures are ordered (X1, P1, X2, P2, ...). The covariance matrix is
/// symmetrized on construction, so every state built through the public
/// operations carries an exactly symmetric covariance. States are immutable;
/// every operation returns a new value.
class GaussianState {
 public:
  GaussianState(Vector mean, Matrix cov);

  std::size_t n_modes() const { return static_cast<std::size_t>(mean_.size() / 2); }
  const Vector& mean() const { return mean_; }
  const Matrix& cov() const { return cov_; }

  /// 2x2 mean/covariance of a single mode.
  Eigen::Vector2d mode_mean(std::size_t mode) const;
  Eigen::Matrix2d mode_cov(std::size_t mode) const;

  /// Reduced state of a single mode (partial trace).
  GaussianState reduced(std::size_t mode) const;

 private:
  Vector mean_;
  Matrix cov_;
};

/// Linear phase-space map z -> matrix * z + displacement.
struct SymplecticTransform {
  Matrix matrix;
  Vector displacement;

  static SymplecticTransform identity(std::size_t n_modes);

  std::size_t n_modes() const { return static_cast<std::size_t>(matrix.rows() / 2); }
  GaussianState apply(const GaussianState& state) const;
  bool is_symplectic(double tol = 1e-10) const;

  /// (this ∘ first): apply `first`, then this transform.
  SymplecticTransform after(const SymplecticTransform& first) const;
};

/// Block-diagonal symplectic form with 2x2 blocks [[0, 1], [-1, 0]].
Matrix symplectic_form(std::size_t n_modes);

/// Symplectic eigenvalues of a covariance matrix, ascending, one per mode.
std::vector<double> symplectic_eigenvalues(const Matrix& cov);

/// True when every symplectic eigenvalue is at least 1/2 - tol.
bool is_physical(const GaussianState& state, double tol = kPhysicalityTolerance);

/// Squeezing parameter r with e^{-2r} = 10^{-db/10}.
double db_to_squeezing(double db);

// Transform builders acting on an n-mode phase space.
SymplecticTransform squeezer(std::size_t n_modes, std::size_t mode, double r, double phi);
SymplecticTransform rotation(std::size_t n_modes, std::size_t mode, double theta);
SymplecticTransform beamsplitter_transform(std::size_t n_modes, std::size_t i, std::size_t j,
                                           double reflectivity);
SymplecticTransform displacement(std::size_t n_modes, std::size_t mode, double dx, double dp);

GaussianState vacuum(std::size_t n_modes);

/// Joint state of independent subsystems, `first` occupying the leading modes.
GaussianState tensor(const GaussianState& first, const GaussianState& second);

/// Single-mode squeezer. The quadrature at angle `phi` has its variance
/// scaled by e^{-2r}; the orthogonal one by e^{+2r}.
GaussianState squeeze(const GaussianState& state, std::size_t mode, double r, double phi = 0.0);

/// Beam splitter with reflectivity R:
///   out_i = sqrt(R) in_i + sqrt(1-R) in_j
///   out_j = sqrt(1-R) in_i - sqrt(R) in_j
/// applied identically to X and P. R must lie strictly inside (0, 1).
GaussianState beamsplitter(const GaussianState& state, std::size_t i, std::size_t j,
                           double reflectivity);

/// Counterclockwise phase-space rotation; theta = pi/2 maps (X, P) -> (-P, X).
GaussianState rotate(const GaussianState& state, std::size_t mode, double theta);

GaussianState displace(const GaussianState& state, std::size_t mode, double dx, double dp);

/// Pure-loss channel with transmission eta in [0, 1].
GaussianState loss(const GaussianState& state, std::size_t mode, double eta);

/// EPR pair with <Δ(X1+X2)^2> = <Δ(P1-P2)^2> = 10^{-db/10}, built from an X-squeezed
/// and a P-squeezed vacuum combined on a 50/50 beam splitter.
GaussianState epr_pair(double entanglement_db);

}  // namespace sqgate
