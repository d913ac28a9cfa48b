#include "slicegeo/random_fields.hpp"

#include <cmath>

namespace slicegeo {

ScalarField random_band_limited(const Grid& grid, Rng& rng, int k_max, double amp,
                                bool with_constant) {
  ScalarField out(grid, with_constant ? rng.uniform(-amp, amp) : 0.0);
  for (int k = 1; k <= k_max; ++k) {
    const double ck = rng.uniform(-amp, amp);
    const double sk = rng.uniform(-amp, amp);
    for (int i = 0; i < grid.n; ++i) {
      const double x = grid.point(i);
      out[i] += ck * std::cos(k * x) + sk * std::sin(k * x);
    }
  }
  return out;
}

}  // namespace slicegeo
