#pragma once

#include <cstdint>

#include "slicegeo/grid.hpp"

namespace slicegeo {

/// splitmix64 stream; bit-reproducible across platforms, unlike the
/// distributions in <random>.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(next() % static_cast<uint64_t>(hi - lo + 1));
  }

 private:
  uint64_t state_;
};

/// Random trigonometric polynomial with harmonics 1..k_max (plus an optional
/// constant term), coefficients uniform in [-amp, amp].
ScalarField random_band_limited(const Grid& grid, Rng& rng, int k_max, double amp,
                                bool with_constant = true);

}  // namespace slicegeo
