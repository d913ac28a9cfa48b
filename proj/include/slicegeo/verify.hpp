#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "slicegeo/spacetime.hpp"

namespace slicegeo {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Seeded property suite for a model: metric positivity, connection symmetry,
/// Koszul self-consistency (exact and finite-difference), curvature sign and
/// invariances, derivative fallbacks, conserved-quantity drift, determinism.
std::vector<CheckResult> run_verification(const SpacetimeModel& model, int grid_n, uint64_t seed);

}  // namespace slicegeo
