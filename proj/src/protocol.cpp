#include "sqgate/protocol.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "sqgate/measurement.hpp"

namespace sqgate {

namespace {

// Mode layout of the analytic network.
constexpr std::size_t kInput = 0;
constexpr std::size_t kEpr1 = 1;  // X-squeezed source before the EPR beam splitter
constexpr std::size_t kEpr2 = 2;  // P-squeezed source before the EPR beam splitter
constexpr std::size_t kAux = 3;

void require_single_mode(const GaussianState& input) {
  if (input.n_modes() != 1) throw std::invalid_argument("gate input must be a single mode");
}

bool ideal_coupler(const GateConfig& config) { return config.coupler_RD >= 1.0; }

DatasetProvenance provenance_for(const GateConfig& config, std::string source,
                                 std::uint64_t seed) {
  const Gains g = config.effective_gains();
  return {std::move(source),
          {{"reflectivity_R", config.reflectivity_R},
           {"gain_x", g.x},
           {"gain_p", g.p},
           {"epr_db", config.epr_db},
           {"coupler_RD", config.coupler_RD},
           {"detection_eta", config.detection_eta}},
          seed};
}

HomodyneDataset allocate_dataset(const GateConfig& config, std::size_t n_shots,
                                 std::span<const double> phases, std::uint64_t seed) {
  if (n_shots == 0) throw std::invalid_argument("n_shots must be at least 1");
  if (phases.empty()) throw std::invalid_argument("at least one output LO phase is required");
  HomodyneDataset data;
  data.shots.resize(n_shots);
  data.provenance = provenance_for(config, "gate", seed);
  return data;
}

}  // namespace

void GateConfig::validate() const {
  if (!(reflectivity_R >= kReflectivityGuard && reflectivity_R <= 1.0 - kReflectivityGuard)) {
    throw std::invalid_argument("reflectivity R=" + std::to_string(reflectivity_R) +
                                " outside (1e-6, 1-1e-6)");
  }
  for (const auto& g : {gain_x, gain_p}) {
    if (g && !(std::isfinite(*g) && *g > 0.0)) {
      throw std::invalid_argument("feed-forward gains must be finite and positive");
    }
  }
  if (!(epr_db >= 0.0)) throw std::invalid_argument("EPR entanglement must be >= 0 dB");
  if (!(coupler_RD > 0.0 && coupler_RD <= 1.0)) {
    throw std::invalid_argument("coupler reflectivity must lie in (0, 1]");
  }
  if (!(detection_eta > 0.0 && detection_eta <= 1.0)) {
    throw std::invalid_argument("detection efficiency must lie in (0, 1]");
  }
}

Gains GateConfig::effective_gains() const {
  const Gains opt = optimal_gains(reflectivity_R);
  const double scale = 1.0 / std::sqrt(detection_eta);
  return {gain_x.value_or(opt.x * scale), gain_p.value_or(opt.p * scale)};
}

double reflectivity_for_target(double target_db, SqueezeAxis axis) {
  if (!(target_db >= 0.0) || !std::isfinite(target_db)) {
    throw std::invalid_argument("negative target squeezing");
  }
  const double s2 = std::pow(10.0, -target_db / 10.0);
  const double r = axis == SqueezeAxis::amplitude ? s2 / (1.0 + s2) : 1.0 / (1.0 + s2);
  if (r < kReflectivityGuard || r > 1.0 - kReflectivityGuard) {
    throw std::invalid_argument("target squeezing too large: reflectivity hits the singular limit");
  }
  return r;
}

Gains optimal_gains(double reflectivity) {
  if (!(reflectivity >= kReflectivityGuard && reflectivity <= 1.0 - kReflectivityGuard)) {
    throw std::invalid_argument("reflectivity outside (1e-6, 1-1e-6)");
  }
  return {1.0 / std::sqrt(1.0 - reflectivity), 1.0 / std::sqrt(reflectivity)};
}

GateConfig gate_config_for_target(double target_db, SqueezeAxis axis, double epr_db) {
  GateConfig config;
  config.reflectivity_R = reflectivity_for_target(target_db, axis);
  config.epr_db = epr_db;
  return config;
}

GaussianState ideal_squeeze_map(const GaussianState& input, double reflectivity) {
  require_single_mode(input);
  const double s = std::sqrt(reflectivity / (1.0 - reflectivity));
  const Eigen::Vector2d d(s, 1.0 / s);
  return GaussianState(d.asDiagonal() * input.mean(),
                       d.asDiagonal() * input.cov() * d.asDiagonal());
}

GateResult run_gate_analytic(const GateConfig& config, const GaussianState& input) {
  config.validate();
  require_single_mode(input);
  const Gains g = config.effective_gains();
  const bool with_aux = !ideal_coupler(config);
  const std::size_t n = with_aux ? 4 : 3;
  const bool ideal_epr = std::isinf(config.epr_db);

  // Unentangled sources: input, X-squeezed and P-squeezed vacua, optional aux vacuum.
  const double r = ideal_epr ? 0.0 : db_to_squeezing(config.epr_db);
  const double squeezed = ideal_epr ? 0.0 : kVacuumVariance * std::exp(-2.0 * r);
  const double anti = ideal_epr ? 0.0 : kVacuumVariance * std::exp(2.0 * r);
  const auto dim = static_cast<Eigen::Index>(2 * n);
  Vector mean0 = Vector::Zero(dim);
  Matrix cov0 = kVacuumVariance * Matrix::Identity(dim, dim);
  mean0.head<2>() = input.mean();
  cov0.topLeftCorner<2, 2>() = input.cov();
  cov0(2 * kEpr1, 2 * kEpr1) = squeezed;
  cov0(2 * kEpr1 + 1, 2 * kEpr1 + 1) = anti;
  cov0(2 * kEpr2, 2 * kEpr2) = anti;
  cov0(2 * kEpr2 + 1, 2 * kEpr2 + 1) = squeezed;

  SymplecticTransform network = beamsplitter_transform(n, kEpr1, kEpr2, 0.5);
  network = beamsplitter_transform(n, kInput, kEpr1, config.reflectivity_R).after(network);
  if (with_aux) network = beamsplitter_transform(n, kEpr2, kAux, config.coupler_RD).after(network);

  // Feed-forward readout: the displaced beam plus the scaled (lossy) homodyne readings.
  // HOM1 reads X of the input-BS port that became mode kInput, HOM2 reads P of port kEpr1.
  const double t = std::sqrt(config.detection_eta);
  Matrix readout = Matrix::Zero(2, dim);
  readout(0, 2 * kEpr2) = 1.0;
  readout(1, 2 * kEpr2 + 1) = 1.0;
  readout(0, 2 * kInput) = g.x * t;
  readout(1, 2 * kEpr1 + 1) = g.p * t;

  Matrix coeffs = readout * network.matrix;
  if (ideal_epr) {
    // Infinite squeezing: the anti-squeezed source quadratures must cancel exactly.
    for (const Eigen::Index col : {Eigen::Index{2 * kEpr1 + 1}, Eigen::Index{2 * kEpr2}}) {
      if (coeffs.col(col).cwiseAbs().maxCoeff() > 1e-9) {
        throw std::invalid_argument("gain mismatch with an infinitely squeezed EPR source diverges");
      }
      coeffs.col(col).setZero();
    }
  }
  Vector mean = coeffs * mean0 + readout * network.displacement;
  Matrix cov = coeffs * cov0 * coeffs.transpose();
  const double detector_noise = (1.0 - config.detection_eta) * kVacuumVariance;
  cov(0, 0) += g.x * g.x * detector_noise;
  cov(1, 1) += g.p * g.p * detector_noise;

  return {GaussianState(std::move(mean), std::move(cov)),
          ideal_squeeze_map(input, config.reflectivity_R), config};
}

GateShotKernel::GateShotKernel(const GateConfig& config, const GaussianState& input)
    : config_(config), gains_(config.effective_gains()), prepared_(vacuum(1)) {
  config_.validate();
  require_single_mode(input);
  if (std::isinf(config_.epr_db)) {
    throw std::invalid_argument("Monte Carlo shots need a finite EPR squeezing level");
  }
  // Modes: 0 input, 1 EPR1, 2 EPR2, 3 aux (coupler only).
  GaussianState state = tensor(input, epr_pair(config_.epr_db));
  if (!ideal_coupler(config_)) state = tensor(state, vacuum(1));
  state = beamsplitter(state, 0, 1, config_.reflectivity_R);
  state = loss(state, 0, config_.detection_eta);
  state = loss(state, 1, config_.detection_eta);
  prepared_ = std::move(state);
}

double GateShotKernel::operator()(std::uint64_t seed, std::uint64_t shot_index,
                                  double lo_phase) const {
  ShotRng rng(seed, shot_index);
  auto [hom1, after1] = homodyne_sample(prepared_, 0, 0.0, rng);
  auto [hom2, after2] = homodyne_sample(*after1, 0, std::numbers::pi / 2, rng);
  // Remaining modes: 0 EPR2, 1 aux (coupler only).
  GaussianState rest = std::move(*after2);
  const double dx = gains_.x * hom1.value;
  const double dp = gains_.p * hom2.value;
  if (ideal_coupler(config_)) {
    rest = displace(rest, 0, dx, dp);
  } else {
    // Bright auxiliary beam carries the displacement through the weak coupler port.
    const double boost = 1.0 / std::sqrt(1.0 - config_.coupler_RD);
    rest = displace(rest, 1, dx * boost, dp * boost);
    rest = beamsplitter(rest, 0, 1, config_.coupler_RD);
  }
  auto [out, unused] = homodyne_sample(rest.reduced(0), 0, lo_phase, rng);
  return out.value;
}

HomodyneDataset run_gate_shots(const GateConfig& config, const GaussianState& input,
                               std::size_t n_shots, std::span<const double> output_lo_phases,
                               std::uint64_t seed) {
  HomodyneDataset data = allocate_dataset(config, n_shots, output_lo_phases, seed);
  const GateShotKernel kernel(config, input);
  const auto n = static_cast<std::int64_t>(n_shots);
  const std::size_t k = output_lo_phases.size();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const double phase = normalize_lo_phase(output_lo_phases[idx % k]);
    data.shots[idx] = {phase, kernel(seed, idx, phase)};
  }
  return data;
}

HomodyneDataset run_gate_shots_serial(const GateConfig& config, const GaussianState& input,
                                      std::size_t n_shots,
                                      std::span<const double> output_lo_phases,
                                      std::uint64_t seed) {
  HomodyneDataset data = allocate_dataset(config, n_shots, output_lo_phases, seed);
  const GateShotKernel kernel(config, input);
  const std::size_t k = output_lo_phases.size();
  for (std::size_t i = 0; i < n_shots; ++i) {
    const double phase = normalize_lo_phase(output_lo_phases[i % k]);
    data.shots[i] = {phase, kernel(seed, i, phase)};
  }
  return data;
}

GateResult run_complex(const GateConfig& config, const GaussianState& input) {
  require_single_mode(input);
  return run_gate_analytic(config, rotate(input, 0, std::numbers::pi / 2));
}

HomodyneDataset run_complex_shots(const GateConfig& config, const GaussianState& input,
                                  std::size_t n_shots, std::span<const double> output_lo_phases,
                                  std::uint64_t seed) {
  require_single_mode(input);
  HomodyneDataset data = run_gate_shots(config, rotate(input, 0, std::numbers::pi / 2), n_shots,
                                        output_lo_phases, seed);
  data.provenance.source = "complex";
  return data;
}

GateConfig complex_config_for_target(double target_db, double epr_db) {
  return gate_config_for_target(target_db, SqueezeAxis::amplitude, epr_db);
}

}  // namespace sqgate
