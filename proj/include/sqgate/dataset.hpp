#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace sqgate {

struct HomodyneShot {
  double lo_phase = 0.0;  // radians in [0, pi)
  double value = 0.0;
};

/// Where a dataset came from: a free-form source tag, named numeric
/// parameters (config echo) and the RNG seed.
struct DatasetProvenance {
  std::string source;
  std::vector<std::pair<std::string, double>> parameters;
  std::uint64_t seed = 0;
};

/// Shot records from a homodyne run. Shot index is the position in `shots`.
struct HomodyneDataset {
  std::vector<HomodyneShot> shots;
  DatasetProvenance provenance;
};

}  // namespace sqgate
