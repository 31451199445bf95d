// Command-line runner for the squeezing-gate simulator.
//
//   sqgate <command> [flags]
//   sqgate --config experiment.json [flags]
//
// Commands: gate, sweep-target, sweep-epr, complex, tomo, validate.
// Flags override values from the config file.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sqgate/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"EPR-assisted squeezing gate simulator"};
  app.set_version_flag("--version", "sqgate 1.0.0");

  std::optional<std::string> command;
  std::optional<std::string> config_path;
  std::optional<double> target_db, epr_db, reflectivity, gain_x, gain_p, coupler_rd, eta;
  std::optional<double> start, stop, step;
  std::optional<double> input_x, input_p, input_sq_db, input_sq_angle;
  std::optional<std::size_t> shots;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out, format, axis, in, dataset;
  std::vector<double> phases;

  app.add_option("command", command, "gate | sweep-target | sweep-epr | complex | tomo | validate");
  app.add_option("--config", config_path, "JSON experiment config");
  app.add_option("--target-db", target_db, "Target squeezing in dB");
  app.add_option("--axis", axis, "Squeezed quadrature: amplitude | phase");
  app.add_option("--epr-db", epr_db, "EPR entanglement in dB");
  app.add_option("--reflectivity", reflectivity, "Override the beam-splitter reflectivity R");
  app.add_option("--gain-x", gain_x, "Override the X feed-forward gain");
  app.add_option("--gain-p", gain_p, "Override the P feed-forward gain");
  app.add_option("--coupler-rd", coupler_rd, "Displacement coupler reflectivity (1 = ideal)");
  app.add_option("--eta", eta, "Homodyne detection efficiency");
  app.add_option("--start", start, "Sweep start (dB)");
  app.add_option("--stop", stop, "Sweep stop (dB)");
  app.add_option("--step", step, "Sweep step (dB)");
  app.add_option("--input-x", input_x, "Input mean X");
  app.add_option("--input-p", input_p, "Input mean P");
  app.add_option("--input-squeeze-db", input_sq_db, "Input squeezing in dB");
  app.add_option("--input-squeeze-angle", input_sq_angle, "Input squeezing angle (rad)");
  app.add_option("--shots", shots, "Monte Carlo shots (0 = analytic only)");
  app.add_option("--seed", seed, "RNG seed");
  app.add_option("--phases", phases, "Output homodyne LO phases (rad)");
  app.add_option("--out", out, "Output file (default: stdout or $SQGATE_OUT_DIR)");
  app.add_option("--format", format, "csv | json");
  app.add_option("--in", in, "tomo: dataset CSV to reconstruct");
  app.add_option("--dataset", dataset, "tomo: write generated shots to this CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    sqgate::ExperimentSpec spec;
    if (config_path) spec = sqgate::load_config(*config_path);
    if (command) {
      spec.command = sqgate::parse_command(*command);
    } else if (!config_path) {
      throw sqgate::ConfigError("a command or --config is required");
    }
    if (target_db) spec.target_db = *target_db;
    if (axis) {
      if (*axis == "amplitude") spec.axis = sqgate::SqueezeAxis::amplitude;
      else if (*axis == "phase") spec.axis = sqgate::SqueezeAxis::phase;
      else throw sqgate::ConfigError("--axis must be amplitude or phase");
    }
    if (epr_db) spec.epr_db = *epr_db;
    if (reflectivity) spec.reflectivity_R = reflectivity;
    if (gain_x) spec.gain_x = gain_x;
    if (gain_p) spec.gain_p = gain_p;
    if (coupler_rd) spec.coupler_RD = *coupler_rd;
    if (eta) spec.detection_eta = *eta;
    if (start || stop || step) {
      sqgate::SweepRange range = spec.sweep_range();
      if (start) range.start = *start;
      if (stop) range.stop = *stop;
      if (step) range.step = *step;
      spec.sweep = range;
    }
    if (input_x || input_p || input_sq_db || input_sq_angle) {
      sqgate::InputSpec input = spec.input.value_or(sqgate::InputSpec{});
      if (input_x) input.mean_x = *input_x;
      if (input_p) input.mean_p = *input_p;
      if (input_sq_db) input.squeeze_db = *input_sq_db;
      if (input_sq_angle) input.squeeze_angle = *input_sq_angle;
      spec.input = input;
    }
    if (shots) spec.n_shots = *shots;
    if (seed) spec.seed = *seed;
    if (!phases.empty()) spec.phases = phases;
    if (out) spec.out = *out;
    if (format) {
      if (*format == "csv") spec.format = sqgate::OutputFormat::csv;
      else if (*format == "json") spec.format = sqgate::OutputFormat::json;
      else throw sqgate::ConfigError("--format must be csv or json");
    }
    if (in) spec.in = *in;
    if (dataset) spec.dataset = *dataset;
    return sqgate::run(spec, std::cout, std::cerr);
  } catch (const sqgate::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return sqgate::kExitConfigError;
  }
}
