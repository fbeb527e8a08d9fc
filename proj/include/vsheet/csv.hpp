#pragma once

#include <iosfwd>
#include <string>

#include "vsheet/field.hpp"

namespace vsheet {

// SpectralField rows: `k,re,im`. SpaceTimeField rows: `t,k,re,im`.
// Floats are written with 17 significant digits so re-reading is exact.
void write_csv(std::ostream& os, const SpectralField& field, bool header = true);
void write_csv(std::ostream& os, const SpaceTimeField& field, bool header = true);

SpectralField read_spectral_csv(std::istream& is, const FrequencyGrid& grid);
SpaceTimeField read_spacetime_csv(std::istream& is, const FrequencyGrid& grid);

std::string format_double(double v);

}  // namespace vsheet
