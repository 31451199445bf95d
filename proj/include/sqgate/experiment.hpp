#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sqgate/gaussian.hpp"
#include "sqgate/protocol.hpp"

namespace sqgate {

/// Bad or unreadable experiment configuration; maps to exit status 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { gate, sweep_target, sweep_epr, complex, tomo, validate };
enum class OutputFormat { csv, json };

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitValidationFailure = 2;

/// Environment variable naming the directory used when no output path is given.
inline constexpr const char* kOutDirEnv = "SQGATE_OUT_DIR";

Command parse_command(const std::string& name);
std::string command_name(Command command);

/// Single-mode input: vacuum squeezed by `squeeze_db` along `squeeze_angle`, then displaced.
struct InputSpec {
  double mean_x = 0.0;
  double mean_p = 0.0;
  double squeeze_db = 0.0;
  double squeeze_angle = 0.0;

  GaussianState build() const;
};

struct SweepRange {
  double start = 0.0;
  double stop = 0.0;
  double step = 1.0;

  /// start, start + step, ... up to stop (inclusive within half a step).
  std::vector<double> values() const;
};

struct ExperimentSpec {
  Command command = Command::gate;
  double target_db = 10.0;
  SqueezeAxis axis = SqueezeAxis::amplitude;
  double epr_db = 12.0;
  std::optional<double> reflectivity_R;
  std::optional<double> gain_x;
  std::optional<double> gain_p;
  double coupler_RD = 1.0;
  double detection_eta = 1.0;
  std::optional<InputSpec> input;
  std::optional<SweepRange> sweep;
  std::size_t n_shots = 0;
  std::uint64_t seed = 0;
  std::vector<double> phases;  // empty -> {0, pi/4, pi/2}
  std::optional<std::filesystem::path> out;
  OutputFormat format = OutputFormat::csv;
  std::optional<std::filesystem::path> in;       // tomo: reconstruct from this dataset
  std::optional<std::filesystem::path> dataset;  // tomo: write generated shots here

  /// Throws ConfigError naming the offending field.
  void validate() const;

  /// Gate configuration for the given target and EPR level.
  GateConfig gate_config(double target_db, double epr_db) const;
  GaussianState input_state() const;
  SweepRange sweep_range() const;
  std::vector<double> lo_phases() const;
};

/// Parses a JSON config. Unknown keys, type mismatches and syntax errors
/// raise ConfigError with the key name or line/column.
ExperimentSpec load_config(const std::filesystem::path& path);
ExperimentSpec parse_config(const std::string& text, const std::string& origin = "<config>");

/// Shortest decimal string that round-trips to the same double.
std::string format_number(double value);

/// Runs the experiment and writes its output file (or `out` when no path is
/// configured). Returns the process exit status.
int run(const ExperimentSpec& spec, std::ostream& out, std::ostream& err);

}  // namespace sqgate
