#pragma once

#include <optional>
#include <string>
#include <vector>

namespace vsheet {

// Discrete torus of length 2*pi*L sampled at N equispaced points. Fourier
// modes are indexed by integer k in [-N/2, N/2-1] with frequency xi_k = k/L.
// The unmatched mode k = -N/2 carries no information and is kept at zero.
class FrequencyGrid {
public:
  FrequencyGrid(int n_modes, double period_scale);

  int n_modes() const noexcept { return n_; }
  double period_scale() const noexcept { return scale_; }
  double period() const noexcept;
  double spacing() const noexcept { return period() / n_; }

  int k_min() const noexcept { return -n_ / 2; }
  int k_max() const noexcept { return n_ / 2 - 1; }

  // Storage index of mode k (0 for k = -N/2).
  int index(int k) const noexcept { return k + n_ / 2; }
  int mode(int index) const noexcept { return index - n_ / 2; }

  double frequency(int k) const noexcept { return k / scale_; }
  double point(int j) const noexcept { return spacing() * j; }
  std::vector<double> points() const;

  bool excluded(int k) const noexcept { return k == -n_ / 2; }
  double max_frequency() const noexcept { return (n_ / 2 - 1) / scale_; }

  bool operator==(const FrequencyGrid& other) const noexcept {
    return n_ == other.n_ && scale_ == other.scale_;
  }

private:
  int n_;
  double scale_;
};

FrequencyGrid make_grid(int n_modes, double period_scale);

// Physical parameters. `alpha` is the exponential time weight of the
// space-time norm; `density_gap` is only used by the porous-medium problem.
struct PhysParams {
  double atwood = 0.0;
  double gravity = -1.0;
  double alpha = 0.1;
  std::optional<double> density_gap;

  // Returns human-readable violations; empty when valid.
  std::vector<std::string> violations() const;
  void validate() const;
};

// Upper bound on alpha for a >= 0 runs: sqrt(1 - a^2) / 2.
double alpha_limit(double atwood);

}  // namespace vsheet
