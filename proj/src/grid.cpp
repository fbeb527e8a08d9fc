#include "vsheet/grid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "vsheet/error.hpp"

namespace vsheet {

FrequencyGrid::FrequencyGrid(int n_modes, double period_scale) : n_(n_modes), scale_(period_scale) {
  require(n_modes >= 8 && n_modes % 2 == 0, ErrorKind::InvalidArgument,
          "n_modes must be even and >= 8, got " + std::to_string(n_modes));
  require(period_scale > 0.0 && std::isfinite(period_scale), ErrorKind::InvalidArgument,
          "period_scale must be positive");
}

double FrequencyGrid::period() const noexcept { return 2.0 * std::numbers::pi * scale_; }

std::vector<double> FrequencyGrid::points() const {
  std::vector<double> x(n_);
  for (int j = 0; j < n_; ++j) x[j] = point(j);
  return x;
}

FrequencyGrid make_grid(int n_modes, double period_scale) { return FrequencyGrid(n_modes, period_scale); }

double alpha_limit(double atwood) { return std::sqrt(1.0 - atwood * atwood) / 2.0; }

std::vector<std::string> PhysParams::violations() const {
  std::vector<std::string> out;
  if (!(std::abs(atwood) < 1.0)) out.push_back("atwood number must satisfy |a| < 1");
  if (!(gravity < 0.0)) out.push_back("gravity must be negative (g < 0)");
  if (!(alpha > 0.0)) out.push_back("alpha must be positive");
  if (atwood > 0.0 && alpha >= alpha_limit(atwood)) {
    std::ostringstream os;
    os << "linear estimate constraint: alpha must be < sqrt(1-a^2)/2 = " << alpha_limit(atwood);
    out.push_back(os.str());
  }
  if (density_gap) {
    if (!(*density_gap > 0.0)) out.push_back("density_gap must be positive (stable regime)");
    else if (alpha >= *density_gap / 2.0) {
      std::ostringstream os;
      os << "alpha must be < density_gap/2 = " << *density_gap / 2.0;
      out.push_back(os.str());
    }
  }
  return out;
}

void PhysParams::validate() const {
  const auto v = violations();
  if (v.empty()) return;
  std::string msg;
  for (const auto& s : v) msg += (msg.empty() ? "" : "; ") + s;
  throw Error(ErrorKind::Configuration, msg);
}

}  // namespace vsheet
