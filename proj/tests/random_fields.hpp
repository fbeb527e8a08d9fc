#pragma once

// Seeded generators for property tests.

#include <cmath>
#include <random>

#include "vsheet/field.hpp"

namespace vsheet::testing {

// Real field with random coefficients on 1 <= |k| <= band, scaled to the
// requested B0 norm. Mean is zero unless `with_mean`.
inline SpectralField random_field(const FrequencyGrid& grid, int band, double b0, std::mt19937_64& rng,
                                  bool with_mean = false) {
  std::uniform_real_distribution<double> amp(0.2, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * 3.141592653589793);
  SpectralField f(grid);
  double total = 0.0;
  for (int k = 1; k <= band; ++k) {
    const cplx c = std::polar(amp(rng), phase(rng));
    f[k] = c;
    f[-k] = std::conj(c);
    total += 2.0 * std::abs(c);
  }
  if (with_mean) {
    f[0] = amp(rng);
    total += std::abs(f[0]);
  }
  if (total > 0.0) f *= b0 / total;
  return f;
}

}  // namespace vsheet::testing
