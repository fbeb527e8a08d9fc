#pragma once

#include <string>
#include <utility>
#include <vector>

#include "vsheet/field.hpp"
#include "vsheet/fixed_point.hpp"
#include "vsheet/grid.hpp"
#include "vsheet/parallel.hpp"

namespace vsheet {

// Porous-medium interface f(x, t), solved for f_x:
//   d_t f_x + (gap/2) Lambda f_x = d_x N(f).
struct MuskatConfig {
  double density_gap = 2.0;  // rho_- - rho_+ > 0
  double alpha = 0.1;        // < density_gap / 2
  int n_modes = 128;
  double period_scale = 1.0;
  double t_max = 2.0;
  int steps = 200;
  double grading_rate = 0.0;
  InitialProfile profile;  // describes f_x(0)
  NonlinearBackend backend = NonlinearBackend::ClosedForm;
  bool nonlinear = true;  // false: linear evolution only
  double picard_tol = 1e-10;
  double series_tol = 1e-12;
  int max_iterations = 50;
  double envelope_factor = 2.0;
  Exec exec = Exec::Parallel;

  FrequencyGrid grid() const;
  TimeGrid time_grid() const;
  std::vector<std::string> violations() const;
  void validate() const;
};

// N(f) = -(gap/2pi) int (f_x - f_x')/(x - x') p^2/(1 + p^2) dx', p = (f - f')/(x - x'),
// periodized. ClosedForm: trapezoid on the summed kernel with its diagonal
// limit. Series: (gap/2) sum_n (-1)^n Ttilde_{2n}(f_x) f_x for 2n <= 10.
SpectralField muskat_nonlinearity(const SpectralField& f_x, double density_gap, NonlinearBackend backend,
                                  Exec exec = Exec::Parallel);

// Bound on the series terms dropped beyond order 10.
double muskat_series_truncation(double fx_b0_norm, double density_gap);

struct MuskatSolution {
  explicit MuskatSolution(SpaceTimeField f) : f_x(std::move(f)) {}

  SpaceTimeField f_x;
  int iterations = 0;
  bool converged = false;
  std::vector<double> contraction_ratios;
  std::vector<IterationRecord> history;
  double residual_norm = 0.0;
  double balpha_norm = 0.0;
  std::vector<double> b0_profile;  // |f_x(t_n)|_B0
  std::vector<double> sup_profile;
};

// e^{-(gap/2)|xi| t} f0x at every node.
SpaceTimeField muskat_linear(const SpectralField& f0x, double density_gap, const TimeGrid& times);

MuskatSolution muskat_picard_solve(const MuskatConfig& config);

// Max over interior nodes of |d_t f_x + (gap/2) Lambda f_x - d_x N(f)|_B0 with
// the exact linear part removed before centered differencing.
double muskat_residual(const SpaceTimeField& f_x, double density_gap, Exec exec = Exec::Parallel);

EnvelopeReport muskat_envelope_check(const MuskatSolution& sol, const MuskatConfig& config);

// RK4 on the interface equation for f itself, alternating-point quadrature.
// Returns f_x at the output nodes.
SpaceTimeField oracle_rk4_muskat(const SpectralField& f0x, double density_gap, const TimeGrid& output,
                                 double max_dt);

}  // namespace vsheet
