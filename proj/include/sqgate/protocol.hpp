#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "sqgate/dataset.hpp"
#include "sqgate/gaussian.hpp"

namespace sqgate {

enum class SqueezeAxis { amplitude, phase };

/// Reflectivities closer than this to 0 or 1 are rejected; the feed-forward gains diverge there.
inline constexpr double kReflectivityGuard = 1e-6;

struct Gains {
  double x = 0.0;
  double p = 0.0;
};

/// Knobs of the EPR-assisted squeezing gate.
///
/// `gain_x` / `gain_p` override the feed-forward scaling of the HOM1 (X) and
/// HOM2 (P) readings; when unset they are filled from optimal_gains(R),
/// divided by sqrt(detection_eta) so lossy detectors keep unit signal gain.
/// `epr_db` may be +infinity for the ideal-ancilla limit (analytic path only).
/// `coupler_RD` = 1 means an ideal displacement of the second EPR beam;
/// below 1 the displacement goes through a beam splitter of that reflectivity.
struct GateConfig {
  double reflectivity_R = 0.5;
  std::optional<double> gain_x;
  std::optional<double> gain_p;
  double epr_db = 12.0;
  double coupler_RD = 1.0;
  double detection_eta = 1.0;

  void validate() const;
  Gains effective_gains() const;
};

struct GateResult {
  GaussianState output;
  GaussianState target;
  GateConfig config;
};

/// Beam-splitter reflectivity that realizes `target_db` of squeezing on the
/// chosen axis: R = s^2/(1+s^2) (amplitude) or 1/(1+s^2) (phase), s^2 = 10^{-dB/10}.
double reflectivity_for_target(double target_db, SqueezeAxis axis);

/// Feed-forward gains that turn the measured quadratures into the ideal
/// squeezing map: g_X = 1/sqrt(1-R), g_P = 1/sqrt(R).
Gains optimal_gains(double reflectivity);

GateConfig gate_config_for_target(double target_db, SqueezeAxis axis, double epr_db);

/// Noise-free squeezing map diag(s, 1/s), s = sqrt(R/(1-R)), applied to a 1-mode state.
GaussianState ideal_squeeze_map(const GaussianState& input, double reflectivity);

/// Unconditional output of the gate, obtained by propagating the joint
/// covariance through the optical network and the linear feed-forward readout.
GateResult run_gate_analytic(const GateConfig& config, const GaussianState& input);

/// Per-shot simulation of one gate use: joint input/EPR preparation, beam
/// splitter, two sampled homodynes with conditioning, feed-forward
/// displacement, and a final homodyne at the shot's LO phase.
class GateShotKernel {
 public:
  GateShotKernel(const GateConfig& config, const GaussianState& input);

  /// Output homodyne reading of shot `shot_index` at `lo_phase`.
  double operator()(std::uint64_t seed, std::uint64_t shot_index, double lo_phase) const;

 private:
  GateConfig config_;
  Gains gains_;
  GaussianState prepared_;
};

/// Monte Carlo run. Shot i uses output_lo_phases[i % size]. Shots run in
/// parallel; results depend only on (config, input, seed), never on threading.
HomodyneDataset run_gate_shots(const GateConfig& config, const GaussianState& input,
                               std::size_t n_shots, std::span<const double> output_lo_phases,
                               std::uint64_t seed);

/// Single-threaded reference for run_gate_shots; produces an identical dataset.
HomodyneDataset run_gate_shots_serial(const GateConfig& config, const GaussianState& input,
                                      std::size_t n_shots,
                                      std::span<const double> output_lo_phases,
                                      std::uint64_t seed);

/// Fourier rotation (pi/2) followed by the squeezing gate. The target is the
/// ideal squeeze applied to the rotated input.
GateResult run_complex(const GateConfig& config, const GaussianState& input);

HomodyneDataset run_complex_shots(const GateConfig& config, const GaussianState& input,
                                  std::size_t n_shots, std::span<const double> output_lo_phases,
                                  std::uint64_t seed);

/// Config for the complex operation: after the Fourier rotation the input's
/// phase quadrature sits in X, so the gate squeezes X (R < 1/2).
GateConfig complex_config_for_target(double target_db, double epr_db);

}  // namespace sqgate
