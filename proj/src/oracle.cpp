#include "sqgate/oracle.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

#include "sqgate/protocol.hpp"

namespace sqgate {

namespace {

struct Integrand {
  Eigen::Vector2d mean;
  Eigen::Matrix2d cov;
};

// W_a W_b is proportional to a Gaussian with precision V_a^{-1} + V_b^{-1}.
Integrand integrand_of(const GaussianState& a, const GaussianState& b) {
  if (a.n_modes() != 1 || b.n_modes() != 1) {
    throw std::invalid_argument("overlap integral needs single-mode states");
  }
  const Eigen::Matrix2d pa = Eigen::Matrix2d(a.cov()).inverse();
  const Eigen::Matrix2d pb = Eigen::Matrix2d(b.cov()).inverse();
  const Eigen::Matrix2d cov = (pa + pb).inverse();
  return {cov * (pa * a.mean() + pb * b.mean()), cov};
}

struct Density {
  Eigen::Vector2d mean;
  Eigen::Matrix2d inv;
  double norm;

  explicit Density(const GaussianState& s)
      : mean(s.mean()),
        inv(Eigen::Matrix2d(s.cov()).inverse()),
        norm(1.0 / (2.0 * std::numbers::pi * std::sqrt(Eigen::Matrix2d(s.cov()).determinant()))) {}

  double operator()(double x, double p) const {
    const double dx = x - mean(0);
    const double dp = p - mean(1);
    return norm * std::exp(-0.5 * (inv(0, 0) * dx * dx + 2.0 * inv(0, 1) * dx * dp +
                                   inv(1, 1) * dp * dp));
  }
};

double row_sum(const Density& wa, const Density& wb, const GridSpec& grid, std::size_t row) {
  const double p = grid.p(row);
  double sum = 0.0;
  for (std::size_t i = 0; i < grid.nx(); ++i) {
    const double x = grid.x(i);
    sum += wa(x, p) * wb(x, p);
  }
  return sum;
}

double pairwise_sum(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
  if (hi - lo <= 8) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += v[i];
    return s;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

double epr_noise(double epr_db) { return std::isinf(epr_db) ? 0.0 : std::pow(10.0, -epr_db / 10.0); }

}  // namespace

OracleVerdict OracleVerdict::compare(double closed_form, double brute_force, double tolerance) {
  const double diff = std::abs(closed_form - brute_force);
  return {closed_form, brute_force, diff, tolerance, diff <= tolerance};
}

GridSpec covering_grid(const GaussianState& a, const GaussianState& b, double n_sigma,
                       double step) {
  const Integrand f = integrand_of(a, b);
  const double hx = n_sigma * std::sqrt(f.cov(0, 0));
  const double hp = n_sigma * std::sqrt(f.cov(1, 1));
  // Snap outward to multiples of the step so grids are reproducible.
  auto lo = [step](double v) { return std::floor(v / step) * step; };
  auto hi = [step](double v) { return std::ceil(v / step) * step; };
  return {lo(f.mean(0) - hx), hi(f.mean(0) + hx), lo(f.mean(1) - hp), hi(f.mean(1) + hp), step};
}

void require_coverage(const GaussianState& a, const GaussianState& b, const GridSpec& grid) {
  grid.validate();
  const Integrand f = integrand_of(a, b);
  const double hx = 6.0 * std::sqrt(f.cov(0, 0));
  const double hp = 6.0 * std::sqrt(f.cov(1, 1));
  const double slack = 1e-9;
  const double x_last = grid.x(grid.nx() - 1);
  const double p_last = grid.p(grid.np() - 1);
  if (f.mean(0) - hx < grid.x_min - slack || f.mean(0) + hx > x_last + slack ||
      f.mean(1) - hp < grid.p_min - slack || f.mean(1) + hp > p_last + slack) {
    throw std::invalid_argument(fmt::format(
        "grid does not cover the overlap integrand to 6 sigma (needs x in [{:.3f}, {:.3f}], "
        "p in [{:.3f}, {:.3f}])",
        f.mean(0) - hx, f.mean(0) + hx, f.mean(1) - hp, f.mean(1) + hp));
  }
}

double overlap_integral(const GaussianState& a, const GaussianState& b, const GridSpec& grid) {
  require_coverage(a, b, grid);
  const Density wa(a);
  const Density wb(b);
  const std::size_t np = grid.np();
  std::vector<double> rows(np, 0.0);
  const auto n = static_cast<std::int64_t>(np);
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < n; ++j) {
    rows[static_cast<std::size_t>(j)] = row_sum(wa, wb, grid, static_cast<std::size_t>(j));
  }
  return 2.0 * std::numbers::pi * pairwise_sum(rows, 0, np) * grid.step * grid.step;
}

double overlap_integral_serial(const GaussianState& a, const GaussianState& b,
                               const GridSpec& grid) {
  require_coverage(a, b, grid);
  const Density wa(a);
  const Density wb(b);
  std::vector<double> rows(grid.np(), 0.0);
  for (std::size_t j = 0; j < grid.np(); ++j) rows[j] = row_sum(wa, wb, grid, j);
  return 2.0 * std::numbers::pi * pairwise_sum(rows, 0, rows.size()) * grid.step * grid.step;
}

OracleVerdict wigner_overlap_fidelity(const GaussianState& pure, const GaussianState& actual,
                                      const GridSpec& grid) {
  const double closed = fidelity(pure, actual).fidelity;
  return OracleVerdict::compare(closed, overlap_integral(pure, actual, grid), kOracleTolerance);
}

OracleVerdict wigner_overlap_fidelity(const GaussianState& pure, const GaussianState& actual) {
  return wigner_overlap_fidelity(pure, actual, covering_grid(pure, actual));
}

OracleVerdict classical_bound_check(double epr_db) {
  GateConfig config;
  config.reflectivity_R = 0.5;
  config.epr_db = epr_db;
  const GateResult result = run_gate_analytic(config, vacuum(1));
  const double closed = fidelity(result.target, result.output).fidelity;
  return OracleVerdict::compare(closed, 1.0 / (1.0 + epr_noise(epr_db)), 1e-12);
}

std::pair<GaussianState, GaussianState> random_state_pair(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> sq_db(0.0, 12.0);
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
  std::uniform_real_distribution<double> shift(-3.0, 3.0);
  std::uniform_real_distribution<double> eta(0.5, 1.0);

  auto pure = squeeze(vacuum(1), 0, db_to_squeezing(sq_db(rng)), angle(rng));
  pure = displace(pure, 0, shift(rng), shift(rng));

  auto mixed = squeeze(vacuum(1), 0, db_to_squeezing(sq_db(rng)), angle(rng));
  mixed = loss(mixed, 0, eta(rng));
  mixed = displace(mixed, 0, shift(rng), shift(rng));
  return {pure, mixed};
}

std::vector<NamedVerdict> validation_suite(std::uint64_t seed, std::size_t n_random) {
  std::vector<NamedVerdict> out;
  out.push_back({"classical_bound_0dB", classical_bound_check(0.0)});
  out.push_back({"teleport_12dB", classical_bound_check(12.0)});
  out.push_back({"teleport_ideal_epr", classical_bound_check(std::numeric_limits<double>::infinity())});

  const GaussianState vac = vacuum(1);
  out.push_back({"vacuum_overlap", wigner_overlap_fidelity(vac, vac)});

  // Squeezed vacua: closed form 1/cosh(Δr) and the grid integral, each checked.
  const double r2 = db_to_squeezing(10.0);
  const GaussianState sq = squeeze(vac, 0, r2);
  const double analytic = 1.0 / std::cosh(r2);
  out.push_back({"squeezed_vacuum_closed_form",
                 OracleVerdict::compare(fidelity(vac, sq).fidelity, analytic, kOracleTolerance)});
  out.push_back({"squeezed_vacuum_grid",
                 OracleVerdict::compare(analytic, overlap_integral(vac, sq, covering_grid(vac, sq)),
                                        kOracleTolerance)});

  for (const double target_db : {4.1, 7.2, 10.0}) {
    const GateResult r = run_gate_analytic(gate_config_for_target(target_db, SqueezeAxis::amplitude, 12.0), vac);
    out.push_back({fmt::format("gate_{:.1f}dB_epr12", target_db),
                   wigner_overlap_fidelity(r.target, r.output)});
  }

  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < n_random; ++i) {
    const auto [pure, actual] = random_state_pair(rng);
    out.push_back({fmt::format("random_pair_{:02d}", i), wigner_overlap_fidelity(pure, actual)});
  }
  return out;
}

}  // namespace sqgate
