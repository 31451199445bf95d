// Parallel kernels must reproduce their serial references exactly, for any thread count.

#include <random>
#include <vector>

#include <doctest.h>
#include <omp.h>

#include "sqgate/metrics.hpp"
#include "sqgate/oracle.hpp"
#include "sqgate/protocol.hpp"
#include "test_support.hpp"

using namespace sqgate;

namespace {

class ThreadCount {
 public:
  explicit ThreadCount(int n) : saved_(omp_get_max_threads()) { omp_set_num_threads(n); }
  ~ThreadCount() { omp_set_num_threads(saved_); }

 private:
  int saved_;
};

bool same(const HomodyneDataset& a, const HomodyneDataset& b) {
  if (a.shots.size() != b.shots.size()) return false;
  for (std::size_t i = 0; i < a.shots.size(); ++i) {
    if (a.shots[i].lo_phase != b.shots[i].lo_phase || a.shots[i].value != b.shots[i].value) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("gate shots: parallel equals serial for 1, 2, 4 and 7 threads") {
  GateConfig cfg = gate_config_for_target(7.2, SqueezeAxis::phase, 9.0);
  cfg.coupler_RD = 0.95;
  cfg.detection_eta = 0.9;
  const auto input = displace(squeeze(vacuum(1), 0, 0.3, 0.2), 0, 0.4, -1.1);
  const std::vector<double> phases{0.0, 0.7, 2.1, 4.0};
  const auto reference = run_gate_shots_serial(cfg, input, 5'000, phases, 21);
  for (int threads : {1, 2, 4, 7}) {
    ThreadCount guard(threads);
    CAPTURE(threads);
    CHECK(same(run_gate_shots(cfg, input, 5'000, phases, 21), reference));
  }
}

TEST_CASE("wigner: parallel equals serial for several thread counts") {
  std::mt19937_64 rng(4);
  const auto st = sqgate::testing::random_state(rng, 1);
  const auto reference = wigner_serial(st);
  for (int threads : {1, 3, 8}) {
    ThreadCount guard(threads);
    const auto field = wigner(st);
    CHECK(field.values == reference.values);
    CHECK(field.riemann_sum == reference.riemann_sum);
  }
}

TEST_CASE("overlap integral: parallel equals serial for several thread counts") {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 3; ++i) {
    const auto [pure, actual] = random_state_pair(rng);
    const auto grid = covering_grid(pure, actual);
    const double reference = overlap_integral_serial(pure, actual, grid);
    for (int threads : {1, 2, 5}) {
      ThreadCount guard(threads);
      CHECK(overlap_integral(pure, actual, grid) == reference);
    }
  }
}
