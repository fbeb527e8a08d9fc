#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "vsheet/field.hpp"
#include "vsheet/grid.hpp"
#include "vsheet/parallel.hpp"

namespace vsheet {

enum class Branch { Plus, Minus };

// lambda_pm(xi) = i a xi pm |xi| m(xi).
cplx eigenvalue(double xi, Branch branch, const PhysParams& params);

// Multiplies mode k by exp(dt lambda_pm(xi_k)); the zero mode is left alone.
// Throws Stability if some factor exceeds 1 + 1e-12 in modulus.
SpectralField semigroup_apply(const SpectralField& field, Branch branch, double dt, const PhysParams& params);

using Matrix2c = Eigen::Matrix2cd;

// Symbol of the linear operator acting on V = (y_x, omega).
Matrix2c symbol_matrix(double xi, const PhysParams& params);
// exp(t A(xi)) in closed form; valid through the degenerate frequency.
Matrix2c matrix_exp_A(double xi, double t, const PhysParams& params);
// Scaling-and-squaring exponential of t A(xi) (reference).
Matrix2c matrix_exp_reference(double xi, double t, const PhysParams& params);

// Smooth cutoff: 1 for s <= T, 0 for s >= 2T.
double cutoff_chi(double s, double T);
double cutoff_chi_derivative(double s, double T);

// One step of product integration with piecewise-linear forcing:
// forward  J_{n+1} = decay J_n + left h_n + right h_{n+1}  (int_0^t e^{(t-s) lambda} h)
// backward J_n = decay J_{n+1} + left h_n + right h_{n+1}  (int_t^T e^{(t-s) lambda} h)
struct StepWeights {
  cplx decay;
  cplx left;
  cplx right;
};
StepWeights forward_weights(cplx lambda, double dt);
StepWeights backward_weights(cplx lambda, double dt);

std::vector<cplx> integrate_forward(cplx lambda, const TimeGrid& times, std::span<const cplx> h);
std::vector<cplx> integrate_backward(cplx lambda, const TimeGrid& times, std::span<const cplx> h);

// Cached per-step weights of both branches for every mode of a grid.
class PropagatorTable {
public:
  PropagatorTable(const FrequencyGrid& grid, const TimeGrid& times, const PhysParams& params);

  cplx lambda(int k, Branch branch) const;
  const StepWeights& forward(int k, int step) const { return minus_[slot(k, step)]; }
  const StepWeights& backward(int k, int step) const { return plus_[slot(k, step)]; }
  const FrequencyGrid& grid() const { return grid_; }
  const TimeGrid& times() const { return times_; }

private:
  int slot(int k, int step) const { return grid_.index(k) * times_.steps() + step; }
  FrequencyGrid grid_;
  TimeGrid times_;
  std::vector<cplx> lambda_plus_, lambda_minus_;
  std::vector<StepWeights> plus_, minus_;
};

enum class ForcingMode {
  None,  // h itself
  Dx,    // h_x
  Dt,    // h_t, handled by integration by parts in s
};

// I^- h(t) = int_0^t S_-(t-s) h(s) ds at every node.
SpaceTimeField duhamel_minus(const SpaceTimeField& forcing, ForcingMode mode, const PhysParams& params);

struct DuhamelPlus {
  SpaceTimeField value;
  // Bound on the part of int_t^infinity beyond the last node, assuming the
  // forcing keeps decaying like exp(-alpha s |xi|) after it.
  double tail_estimate = 0.0;
};

// I^+ h(t) = int_t^infinity S_+(t-s) h(s) ds, truncated at the last node.
DuhamelPlus duhamel_plus(const SpaceTimeField& forcing, ForcingMode mode, const PhysParams& params);

struct AssemblyOptions {
  double tail_tol = 1e-10;
  Exec exec = Exec::Parallel;
};

struct AssemblyResult {
  SpaceTimeField y_x;
  SpaceTimeField omega;
  SpaceTimeField u_plus;
  SpaceTimeField u_minus;
  SpectralField omega0_prescribed;
  double tail_estimate = 0.0;
  // Last time at which the representation solves the equations.
  double valid_until = 0.0;
  int low_modes = 0;
  int high_modes = 0;
};

// Solution of the forced linear system with N1 = F_x, N2 = (G1)_t + (G2)_x
// for a >= 0, with omega(0) chosen so that u_+ stays bounded. The zero mode
// of omega follows G1.
AssemblyResult assemble_apos(const SpectralField& y0x, const SpaceTimeField& F, const SpaceTimeField& G1,
                             const SpaceTimeField& G2, const PhysParams& params, const AssemblyOptions& options = {});

// a < 0, g < 0 on [0, T]: modes with |xi| <= 2ag/(1-a^2) are propagated by
// exp(t A(xi)) from (y0x, omega0); the others use the diagonal form with the
// forcing multiplied by cutoff_chi(s, T).
AssemblyResult assemble_aneg(const SpectralField& y0x, const SpectralField& omega0, const SpaceTimeField& F,
                             const SpaceTimeField& G1, const SpaceTimeField& G2, double T, const PhysParams& params,
                             const AssemblyOptions& options = {});

// U = B V per mode (zero mode: u_+ = -omega, u_- = omega).
std::pair<SpectralField, SpectralField> to_diagonal(const SpectralField& y_x, const SpectralField& omega,
                                                    const PhysParams& params);

// Threshold 2ag/(1-a^2) separating the two paths when a < 0.
double split_frequency(const PhysParams& params);

}  // namespace vsheet
