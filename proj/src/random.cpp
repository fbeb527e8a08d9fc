#include "vsheet/random.hpp"

#include <numbers>

namespace vsheet {

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

SpectralField random_band_field(const FrequencyGrid& grid, int band, double b0, std::mt19937_64& rng,
                                bool with_mean) {
  SpectralField f(grid);
  double total = 0.0;
  for (int k = 1; k <= band; ++k) {
    const double amp = 0.2 + 0.8 * unit_uniform(rng);
    f[k] = std::polar(amp, 2.0 * std::numbers::pi * unit_uniform(rng));
    f[-k] = std::conj(f[k]);
    total += 2.0 * amp;
  }
  if (with_mean) {
    f[0] = 0.2 + 0.8 * unit_uniform(rng);
    total += f[0].real();
  }
  if (total > 0.0) f *= b0 / total;
  return f;
}

}  // namespace vsheet
