#include "sqgate/experiment.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "sqgate/measurement.hpp"
#include "sqgate/metrics.hpp"
#include "sqgate/oracle.hpp"
#include "sqgate/tomography.hpp"

namespace sqgate {

namespace {

using Json = nlohmann::ordered_json;

// Displacement that puts the P-quadrature power 10 dB above the vacuum: 0.5 + d^2 = 5.
const double kComplexDefaultMeanP = std::sqrt(4.5);
constexpr std::uint64_t kValidationSeed = 20240917;

// ---------------------------------------------------------------- config

double get_number(const Json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError(fmt::format("field '{}': expected a number", key));
  return j.get<double>();
}

std::uint64_t get_count(const Json& j, const std::string& key) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    throw ConfigError(fmt::format("field '{}': expected a non-negative integer", key));
  }
  return j.get<std::uint64_t>();
}

std::string get_string(const Json& j, const std::string& key) {
  if (!j.is_string()) throw ConfigError(fmt::format("field '{}': expected a string", key));
  return j.get<std::string>();
}

void require_object(const Json& j, const std::string& key) {
  if (!j.is_object()) throw ConfigError(fmt::format("field '{}': expected an object", key));
}

SqueezeAxis parse_axis(const std::string& s) {
  if (s == "amplitude") return SqueezeAxis::amplitude;
  if (s == "phase") return SqueezeAxis::phase;
  throw ConfigError("field 'axis': expected \"amplitude\" or \"phase\", got \"" + s + "\"");
}

OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw ConfigError("field 'format': expected \"csv\" or \"json\", got \"" + s + "\"");
}

std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

// ---------------------------------------------------------------- output

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::optional<double>>> rows;
};

void write_table(const Table& t, OutputFormat format, std::ostream& os) {
  if (format == OutputFormat::csv) {
    os << fmt::format("{}\n", fmt::join(t.columns, ","));
    for (const auto& row : t.rows) {
      std::vector<std::string> cells;
      cells.reserve(row.size());
      for (const auto& v : row) cells.push_back(v ? format_number(*v) : std::string{});
      os << fmt::format("{}\n", fmt::join(cells, ","));
    }
    return;
  }
  Json arr = Json::array();
  for (const auto& row : t.rows) {
    Json obj = Json::object();
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      obj[t.columns[c]] = row[c] ? Json(*row[c]) : Json(nullptr);
    }
    arr.push_back(std::move(obj));
  }
  os << arr.dump(2) << '\n';
}

struct McEstimate {
  double fidelity = 0.0;
  double stderr_ = 0.0;
};

// Delta-method error of the fidelity from the reconstruction standard errors.
McEstimate mc_fidelity(const GaussianState& target, const Reconstruction& rec) {
  const double base = fidelity(target, rec.state).fidelity;
  const Eigen::Vector2d mu = rec.state.mean();
  const Eigen::Matrix2d v = rec.state.cov();
  const std::array<double, 5> errors{rec.mean_stderr(0), rec.mean_stderr(1), rec.stderr_xx,
                                     rec.stderr_pp, rec.stderr_xp};
  double var = 0.0;
  for (std::size_t k = 0; k < errors.size(); ++k) {
    const double h = 1e-6;
    Eigen::Vector2d m2 = mu;
    Eigen::Matrix2d v2 = v;
    switch (k) {
      case 0: m2(0) += h; break;
      case 1: m2(1) += h; break;
      case 2: v2(0, 0) += h; break;
      case 3: v2(1, 1) += h; break;
      default: v2(0, 1) += h; v2(1, 0) += h; break;
    }
    const double grad = (fidelity(target, GaussianState(m2, v2)).fidelity - base) / h;
    var += grad * grad * errors[k] * errors[k];
  }
  return {base, std::sqrt(var)};
}

std::vector<std::optional<double>> gate_row(const ExperimentSpec& spec, double target_db,
                                            double epr_db, std::size_t index) {
  const GateConfig config = spec.gate_config(target_db, epr_db);
  const GaussianState input = spec.input_state();
  const GateResult result = run_gate_analytic(config, input);
  const Gains g = config.effective_gains();
  const SqueezingReport sq = squeezing_db(result.output);
  std::optional<double> mc_f;
  std::optional<double> mc_se;
  if (spec.n_shots > 0) {
    const auto phases = spec.lo_phases();
    const auto data = run_gate_shots(config, input, spec.n_shots, phases, spec.seed + index);
    const McEstimate mc = mc_fidelity(result.target, reconstruct(data));
    mc_f = mc.fidelity;
    mc_se = mc.stderr_;
  }
  return {target_db, epr_db, config.reflectivity_R, g.x, g.p,
          fidelity(result.target, result.output).fidelity, sq.min_variance_db,
          sq.max_variance_db, mc_f, mc_se};
}

const std::vector<std::string> kSweepColumns{
    "target_db", "epr_db", "R", "gx", "gp", "fidelity", "sq_out_db", "antisq_out_db",
    "mc_fidelity", "mc_stderr"};

Table run_sweep(const ExperimentSpec& spec) {
  Table t{kSweepColumns, {}};
  const auto values = spec.sweep_range().values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (spec.command == Command::sweep_target) {
      t.rows.push_back(gate_row(spec, values[i], spec.epr_db, i));
    } else {
      t.rows.push_back(gate_row(spec, spec.target_db, values[i], i));
    }
  }
  return t;
}

Table run_complex_table(const ExperimentSpec& spec) {
  const GateConfig config = spec.gate_config(spec.target_db, spec.epr_db);
  const GaussianState input = spec.input_state();
  const GateResult result = run_complex(config, input);
  const Gains g = config.effective_gains();
  const SqueezingReport sq = squeezing_db(result.output);
  const Eigen::Matrix2d v = result.output.cov();
  std::optional<double> mc_f;
  std::optional<double> mc_se;
  if (spec.n_shots > 0) {
    const auto data = run_complex_shots(config, input, spec.n_shots, spec.lo_phases(), spec.seed);
    const McEstimate mc = mc_fidelity(result.target, reconstruct(data));
    mc_f = mc.fidelity;
    mc_se = mc.stderr_;
  }
  return {{"target_db", "epr_db", "R", "gx", "gp", "fidelity", "x_power_db", "p_power_db",
           "x_var_db", "p_var_db", "sq_out_db", "antisq_out_db", "mc_fidelity", "mc_stderr"},
          {{spec.target_db, spec.epr_db, config.reflectivity_R, g.x, g.p,
            fidelity(result.target, result.output).fidelity,
            quadrature_power_db(result.output, 0.0),
            quadrature_power_db(result.output, std::numbers::pi / 2), variance_to_db(v(0, 0)),
            variance_to_db(v(1, 1)), sq.min_variance_db, sq.max_variance_db, mc_f, mc_se}}};
}

void write_tomo_report(const ExperimentSpec& spec, const Reconstruction& rec,
                       const std::optional<GateResult>& analytic, std::ostream& os) {
  const Eigen::Vector2d mu = rec.state.mean();
  const Eigen::Matrix2d v = rec.state.cov();
  const std::vector<std::string> names{"mean_x", "mean_p", "cov_xx", "cov_pp", "cov_xp"};
  const std::array<double, 5> est{mu(0), mu(1), v(0, 0), v(1, 1), v(0, 1)};
  const std::array<double, 5> err{rec.mean_stderr(0), rec.mean_stderr(1), rec.stderr_xx,
                                  rec.stderr_pp, rec.stderr_xp};
  std::array<std::optional<double>, 5> ref{};
  if (analytic) {
    const Eigen::Vector2d am = analytic->output.mean();
    const Eigen::Matrix2d av = analytic->output.cov();
    ref = {am(0), am(1), av(0, 0), av(1, 1), av(0, 1)};
  }
  if (spec.format == OutputFormat::csv) {
    os << "quantity,estimate,stderr,analytic\n";
    for (std::size_t k = 0; k < names.size(); ++k) {
      os << names[k] << ',' << format_number(est[k]) << ',' << format_number(err[k]) << ','
         << (ref[k] ? format_number(*ref[k]) : std::string{}) << '\n';
    }
    return;
  }
  Json j;
  for (std::size_t k = 0; k < names.size(); ++k) {
    j[names[k]] = {{"estimate", est[k]},
                   {"stderr", err[k]},
                   {"analytic", ref[k] ? Json(*ref[k]) : Json(nullptr)}};
  }
  const SqueezingReport sq = squeezing_db(rec.state);
  j["sq_out_db"] = sq.min_variance_db;
  j["antisq_out_db"] = sq.max_variance_db;
  j["principal_angle"] = sq.principal_angle;
  j["projected"] = rec.projected;
  if (analytic) j["mc_fidelity"] = fidelity(analytic->target, rec.state).fidelity;
  os << j.dump(2) << '\n';
}

std::filesystem::path default_output_path(const ExperimentSpec& spec) {
  const char* dir = std::getenv(kOutDirEnv);
  const std::string ext = spec.format == OutputFormat::csv ? "csv" : "json";
  return std::filesystem::path(dir) / (command_name(spec.command) + "." + ext);
}

}  // namespace

// ------------------------------------------------------------------ public

Command parse_command(const std::string& name) {
  if (name == "gate") return Command::gate;
  if (name == "sweep-target") return Command::sweep_target;
  if (name == "sweep-epr") return Command::sweep_epr;
  if (name == "complex") return Command::complex;
  if (name == "tomo") return Command::tomo;
  if (name == "validate") return Command::validate;
  throw ConfigError("unknown command \"" + name + "\"");
}

std::string command_name(Command command) {
  switch (command) {
    case Command::gate: return "gate";
    case Command::sweep_target: return "sweep-target";
    case Command::sweep_epr: return "sweep-epr";
    case Command::complex: return "complex";
    case Command::tomo: return "tomo";
    case Command::validate: return "validate";
  }
  return "gate";
}

GaussianState InputSpec::build() const {
  GaussianState s = vacuum(1);
  if (squeeze_db != 0.0) s = squeeze(s, 0, db_to_squeezing(squeeze_db), squeeze_angle);
  return displace(s, 0, mean_x, mean_p);
}

std::vector<double> SweepRange::values() const {
  std::vector<double> out;
  const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 0.5)) + 1;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(start + static_cast<double>(i) * step);
  return out;
}

void ExperimentSpec::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (!(target_db >= 0.0) || !std::isfinite(target_db)) fail("negative target: target_db must be >= 0");
  if (!(epr_db >= 0.0)) fail("field 'epr_db': must be >= 0");
  if (reflectivity_R && !(*reflectivity_R > 0.0 && *reflectivity_R < 1.0)) {
    fail("field 'reflectivity_R': must lie in (0, 1)");
  }
  if (gain_x && !(*gain_x > 0.0 && std::isfinite(*gain_x))) fail("field 'gain_x': must be positive");
  if (gain_p && !(*gain_p > 0.0 && std::isfinite(*gain_p))) fail("field 'gain_p': must be positive");
  if (!(coupler_RD > 0.0 && coupler_RD <= 1.0)) fail("field 'coupler_RD': must lie in (0, 1]");
  if (!(detection_eta > 0.0 && detection_eta <= 1.0)) fail("field 'detection_eta': must lie in (0, 1]");
  if (input && !(input->squeeze_db >= 0.0)) fail("field 'input.squeeze_db': must be >= 0");
  if (sweep) {
    if (!(sweep->step > 0.0)) fail("field 'sweep.step': must be > 0");
    if (!(sweep->stop >= sweep->start)) fail("field 'sweep': empty range (stop < start)");
    if (command == Command::sweep_target && sweep->start < 0.0) fail("negative target in sweep range");
    if (command == Command::sweep_epr && sweep->start < 0.0) fail("field 'sweep.start': negative EPR level");
  }
  if (command == Command::tomo && !in && n_shots != 0 && n_shots < 3 * kMinShotsPerPhase) {
    fail("field 'n_shots': tomography needs at least 100 shots per phase");
  }
  if (std::isinf(epr_db) && n_shots > 0) fail("field 'epr_db': Monte Carlo needs a finite value");
}

GateConfig ExperimentSpec::gate_config(double target, double epr) const {
  GateConfig config;
  config.reflectivity_R = reflectivity_R ? *reflectivity_R
                                         : (command == Command::complex
                                                ? complex_config_for_target(target, epr).reflectivity_R
                                                : reflectivity_for_target(target, axis));
  config.gain_x = gain_x;
  config.gain_p = gain_p;
  config.epr_db = epr;
  config.coupler_RD = coupler_RD;
  config.detection_eta = detection_eta;
  return config;
}

GaussianState ExperimentSpec::input_state() const {
  if (input) return input->build();
  if (command == Command::complex) return displace(vacuum(1), 0, 0.0, kComplexDefaultMeanP);
  return vacuum(1);
}

SweepRange ExperimentSpec::sweep_range() const {
  if (sweep) return *sweep;
  if (command == Command::sweep_epr) return {0.0, 20.0, 1.0};
  return {1.0, 15.0, 0.5};
}

std::vector<double> ExperimentSpec::lo_phases() const {
  if (!phases.empty()) return phases;
  return {0.0, std::numbers::pi / 4, std::numbers::pi / 2};
}

ExperimentSpec parse_config(const std::string& text, const std::string& origin) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ConfigError(fmt::format("{}:{}:{}: JSON parse error: {}", origin, line, col, e.what()));
  }
  if (!j.is_object()) throw ConfigError(origin + ": top-level JSON value must be an object");

  if (!j.contains("command")) throw ConfigError(origin + ": missing required key 'command'");
  ExperimentSpec spec;
  spec.command = parse_command(get_string(j["command"], "command"));
  for (const auto& [key, value] : j.items()) {
    if (key == "command") {
      continue;
    } else if (key == "target_db") {
      spec.target_db = get_number(value, key);
    } else if (key == "axis") {
      spec.axis = parse_axis(get_string(value, key));
    } else if (key == "epr_db") {
      spec.epr_db = get_number(value, key);
    } else if (key == "reflectivity_R") {
      spec.reflectivity_R = get_number(value, key);
    } else if (key == "gain_x") {
      spec.gain_x = get_number(value, key);
    } else if (key == "gain_p") {
      spec.gain_p = get_number(value, key);
    } else if (key == "coupler_RD") {
      spec.coupler_RD = get_number(value, key);
    } else if (key == "detection_eta") {
      spec.detection_eta = get_number(value, key);
    } else if (key == "n_shots") {
      spec.n_shots = get_count(value, key);
    } else if (key == "seed") {
      spec.seed = get_count(value, key);
    } else if (key == "out") {
      spec.out = get_string(value, key);
    } else if (key == "in") {
      spec.in = get_string(value, key);
    } else if (key == "dataset") {
      spec.dataset = get_string(value, key);
    } else if (key == "format") {
      spec.format = parse_format(get_string(value, key));
    } else if (key == "phases") {
      if (!value.is_array() || value.empty()) throw ConfigError("field 'phases': expected a non-empty array");
      for (const auto& p : value) spec.phases.push_back(get_number(p, "phases[]"));
    } else if (key == "input") {
      require_object(value, key);
      InputSpec in;
      for (const auto& [k, v] : value.items()) {
        const std::string name = "input." + k;
        if (k == "mean_x") in.mean_x = get_number(v, name);
        else if (k == "mean_p") in.mean_p = get_number(v, name);
        else if (k == "squeeze_db") in.squeeze_db = get_number(v, name);
        else if (k == "squeeze_angle") in.squeeze_angle = get_number(v, name);
        else throw ConfigError("unknown key '" + name + "'");
      }
      spec.input = in;
    } else if (key == "sweep") {
      require_object(value, key);
      SweepRange range = spec.command == Command::sweep_epr ? SweepRange{0.0, 20.0, 1.0}
                                                            : SweepRange{1.0, 15.0, 0.5};
      for (const auto& [k, v] : value.items()) {
        const std::string name = "sweep." + k;
        if (k == "start") range.start = get_number(v, name);
        else if (k == "stop") range.stop = get_number(v, name);
        else if (k == "step") range.step = get_number(v, name);
        else throw ConfigError("unknown key '" + name + "'");
      }
      spec.sweep = range;
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  }
  spec.validate();
  return spec;
}

ExperimentSpec load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.string());
}

std::string format_number(double value) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

int run(const ExperimentSpec& spec, std::ostream& out, std::ostream& err) {
  try {
    spec.validate();
    std::optional<std::filesystem::path> path = spec.out;
    if (!path && std::getenv(kOutDirEnv) != nullptr) path = default_output_path(spec);

    std::ostringstream body;
    int status = kExitOk;
    switch (spec.command) {
      case Command::gate:
        write_table({kSweepColumns, {gate_row(spec, spec.target_db, spec.epr_db, 0)}}, spec.format,
                    body);
        break;
      case Command::sweep_target:
      case Command::sweep_epr:
        write_table(run_sweep(spec), spec.format, body);
        break;
      case Command::complex:
        write_table(run_complex_table(spec), spec.format, body);
        break;
      case Command::tomo: {
        HomodyneDataset data;
        std::optional<GateResult> analytic;
        if (spec.in) {
          data = read_dataset_csv(*spec.in);
        } else {
          const GateConfig config = spec.gate_config(spec.target_db, spec.epr_db);
          const std::size_t shots = spec.n_shots > 0 ? spec.n_shots : 100000;
          data = run_gate_shots(config, spec.input_state(), shots, spec.lo_phases(), spec.seed);
          analytic = run_gate_analytic(config, spec.input_state());
          if (spec.dataset) {
            write_dataset_csv(data, *spec.dataset);
            write_provenance_json(data, spec.dataset->string() + ".json");
          }
        }
        write_tomo_report(spec, reconstruct(data), analytic, body);
        break;
      }
      case Command::validate: {
        const auto verdicts = validation_suite(spec.seed == 0 ? kValidationSeed : spec.seed);
        bool all_pass = true;
        for (const auto& v : verdicts) all_pass = all_pass && v.verdict.pass;
        if (spec.format == OutputFormat::csv) {
          body << "name,closed_form,brute_force,abs_diff,tolerance,pass\n";
          for (const auto& v : verdicts) {
            body << v.name << ',' << format_number(v.verdict.closed_form) << ','
                 << format_number(v.verdict.brute_force) << ',' << format_number(v.verdict.abs_diff)
                 << ',' << format_number(v.verdict.tolerance) << ','
                 << (v.verdict.pass ? "true" : "false") << '\n';
          }
        } else {
          Json j;
          j["all_pass"] = all_pass;
          Json arr = Json::array();
          for (const auto& v : verdicts) {
            arr.push_back({{"name", v.name},
                           {"closed_form", v.verdict.closed_form},
                           {"brute_force", v.verdict.brute_force},
                           {"abs_diff", v.verdict.abs_diff},
                           {"tolerance", v.verdict.tolerance},
                           {"pass", v.verdict.pass}});
          }
          j["verdicts"] = std::move(arr);
          body << j.dump(2) << '\n';
        }
        if (!all_pass) {
          err << "validation failed\n";
          status = kExitValidationFailure;
        }
        break;
      }
    }

    if (path) {
      std::ofstream file(*path, std::ios::binary);
      if (!file) throw ConfigError("cannot write output file " + path->string());
      file << body.str();
      if (!file) throw ConfigError("write failed for " + path->string());
    } else {
      out << body.str();
    }
    return status;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
}

}  // namespace sqgate
