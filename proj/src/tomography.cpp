#include "sqgate/tomography.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

#include <fmt/format.h>
#include <json.hpp>

#include "sqgate/measurement.hpp"

namespace sqgate {

namespace {

constexpr double kPhaseMatchTolerance = 1e-9;

// Welford accumulator; deterministic for a fixed shot order.
struct Accumulator {
  double lo_phase = 0.0;
  std::size_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }
};

}  // namespace

std::vector<PhaseMoments> phase_moments(const HomodyneDataset& dataset) {
  std::vector<Accumulator> groups;
  for (const auto& shot : dataset.shots) {
    Accumulator* target = nullptr;
    for (auto& g : groups) {
      if (std::abs(g.lo_phase - shot.lo_phase) < kPhaseMatchTolerance) {
        target = &g;
        break;
      }
    }
    if (target == nullptr) {
      groups.push_back({shot.lo_phase, 0, 0.0, 0.0});
      target = &groups.back();
    }
    target->add(shot.value);
  }
  std::vector<PhaseMoments> out;
  out.reserve(groups.size());
  for (const auto& g : groups) {
    const double var = g.count > 1 ? g.m2 / static_cast<double>(g.count - 1) : 0.0;
    out.push_back({g.lo_phase, g.count, g.mean, var});
  }
  return out;
}

Reconstruction reconstruct(const HomodyneDataset& dataset) {
  auto moments = phase_moments(dataset);
  if (moments.size() < kMinPhases) throw std::invalid_argument("insufficient phases");
  for (const auto& m : moments) {
    if (m.count < kMinShotsPerPhase) {
      throw std::invalid_argument(fmt::format("phase {:.6g} has only {} shots (need {})",
                                              m.lo_phase, m.count, kMinShotsPerPhase));
    }
  }

  const auto k = static_cast<Eigen::Index>(moments.size());
  Eigen::MatrixXd a_mean(k, 2);
  Eigen::MatrixXd a_var(k, 3);
  Eigen::VectorXd y_mean(k);
  Eigen::VectorXd y_var(k);
  Eigen::VectorXd w_mean(k);
  Eigen::VectorXd w_var(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto& m = moments[static_cast<std::size_t>(i)];
    const double c = std::cos(m.lo_phase);
    const double s = std::sin(m.lo_phase);
    const auto n = static_cast<double>(m.count);
    a_mean.row(i) << c, s;
    a_var.row(i) << c * c, s * s, 2.0 * s * c;
    y_mean(i) = m.mean;
    y_var(i) = m.variance;
    w_mean(i) = n / m.variance;
    const double se = m.variance * std::sqrt(2.0 / n);
    w_var(i) = 1.0 / (se * se);
  }

  const Eigen::Matrix2d normal_mean = a_mean.transpose() * w_mean.asDiagonal() * a_mean;
  const Eigen::Matrix3d normal_var = a_var.transpose() * w_var.asDiagonal() * a_var;
  const Eigen::Matrix2d cov_mean = normal_mean.inverse();
  const Eigen::Matrix3d cov_var = normal_var.inverse();
  const Eigen::Vector2d mu = cov_mean * (a_mean.transpose() * w_mean.asDiagonal() * y_mean);
  const Eigen::Vector3d v = cov_var * (a_var.transpose() * w_var.asDiagonal() * y_var);

  Reconstruction rec;
  rec.mean_stderr = cov_mean.diagonal().cwiseSqrt();
  rec.stderr_xx = std::sqrt(cov_var(0, 0));
  rec.stderr_pp = std::sqrt(cov_var(1, 1));
  rec.stderr_xp = std::sqrt(cov_var(2, 2));
  rec.phases = std::move(moments);

  Eigen::Matrix2d cov;
  cov << v(0), v(2), v(2), v(1);
  const double det = cov.determinant();
  if (!(det > 0.0) || !(cov(0, 0) > 0.0)) throw std::domain_error("unphysical reconstruction");
  const double nu = std::sqrt(det);
  if (nu < kVacuumVariance) {
    // Delta-method error of nu = sqrt(VXX VPP - VXP^2), entries treated as independent.
    const Eigen::Vector3d grad(cov(1, 1), cov(0, 0), -2.0 * cov(0, 1));
    const double se_nu = std::sqrt(grad.transpose() * cov_var * grad) / (2.0 * nu);
    if (kVacuumVariance - nu > 3.0 * se_nu) throw std::domain_error("unphysical reconstruction");
    cov *= kVacuumVariance / nu;
    rec.projected = true;
  }
  rec.state = GaussianState(mu, cov);
  return rec;
}

std::vector<Eigen::Vector2d> ellipse(const GaussianState& state, double n_sigma,
                                     std::size_t points) {
  if (state.n_modes() != 1) throw std::invalid_argument("ellipse needs a single-mode state");
  if (!(n_sigma > 0.0)) throw std::invalid_argument("n_sigma must be positive");
  if (points == 0) throw std::invalid_argument("ellipse needs at least one point");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(Eigen::Matrix2d(state.cov()));
  const Eigen::Matrix2d axes =
      solver.eigenvectors() * solver.eigenvalues().cwiseSqrt().asDiagonal() * n_sigma;
  const Eigen::Vector2d center = state.mean();
  std::vector<Eigen::Vector2d> curve;
  curve.reserve(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(points);
    curve.emplace_back(center + axes * Eigen::Vector2d(std::cos(t), std::sin(t)));
  }
  return curve;
}

void write_dataset_csv(const HomodyneDataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "shot_index,lo_phase_rad,value\n";
  std::string line;
  for (std::size_t i = 0; i < dataset.shots.size(); ++i) {
    line.clear();
    fmt::format_to(std::back_inserter(line), "{},{:.17g},{:.17g}\n", i, dataset.shots[i].lo_phase,
                   dataset.shots[i].value);
    out << line;
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

HomodyneDataset read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "shot_index,lo_phase_rad,value") {
    throw std::runtime_error(path.string() + ":1: expected header shot_index,lo_phase_rad,value");
  }
  HomodyneDataset data;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string idx, phase, value;
    if (!std::getline(row, idx, ',') || !std::getline(row, phase, ',') ||
        !std::getline(row, value)) {
      throw std::runtime_error(fmt::format("{}:{}: expected 3 columns", path.string(), line_no));
    }
    try {
      if (std::stoull(idx) != data.shots.size()) {
        throw std::runtime_error(fmt::format("{}:{}: shot_index out of sequence", path.string(),
                                             line_no));
      }
      const double raw = std::stod(phase);
      // A reading at theta + pi is the negated reading at theta.
      const bool flip = static_cast<long long>(std::floor(raw / std::numbers::pi)) % 2 != 0;
      const double v = std::stod(value);
      data.shots.push_back({normalize_lo_phase(raw), flip ? -v : v});
    } catch (const std::logic_error&) {
      throw std::runtime_error(fmt::format("{}:{}: malformed number", path.string(), line_no));
    }
  }
  data.provenance.source = "file:" + path.filename().string();
  return data;
}

void write_provenance_json(const HomodyneDataset& dataset, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["source"] = dataset.provenance.source;
  j["seed"] = dataset.provenance.seed;
  j["n_shots"] = dataset.shots.size();
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [name, value] : dataset.provenance.parameters) params[name] = value;
  j["parameters"] = params;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

DatasetProvenance read_provenance_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const auto j = nlohmann::ordered_json::parse(in);
  DatasetProvenance p;
  p.source = j.at("source").get<std::string>();
  p.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& [name, value] : j.at("parameters").items()) {
    p.parameters.emplace_back(name, value.get<double>());
  }
  return p;
}

}  // namespace sqgate
