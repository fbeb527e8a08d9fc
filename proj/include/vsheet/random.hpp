#pragma once

#include <cstdint>
#include <random>

#include "vsheet/field.hpp"

namespace vsheet {

// Uniform on [0, 1) from the top 53 bits; identical across standard libraries.
double unit_uniform(std::mt19937_64& rng);

// Real field with coefficients of modulus in [0.2, 1] and uniform phase on
// 1 <= |k| <= band, scaled to the requested B0 norm. Zero mean unless `with_mean`.
SpectralField random_band_field(const FrequencyGrid& grid, int band, double b0, std::mt19937_64& rng,
                                bool with_mean = false);

}  // namespace vsheet
