#pragma once

#include <utility>

#include "vsheet/field.hpp"
#include "vsheet/grid.hpp"
#include "vsheet/singular_ops.hpp"

namespace vsheet {

enum class NonlinearBackend { ClosedForm, Series };

struct SeriesOptions {
  // Series stop once the certified tail of every T_j sum is below this.
  double tol = 1e-12;
  int max_terms = 200;
  Backend tj_backend = Backend::Quadrature;
  OperatorConfig op;
};

// Nonlinear terms of the sheet equations:
//   d/dt y_x - Lambda omega = F_x,
//   d/dt omega + a H d/dt y_x - Lambda y_x - a omega_x + a g y_x = (G1)_t + (G2)_x.
// G2 is returned without its additive constant.
struct NonlinearEval {
  SpectralField F;
  SpectralField G1;
  SpectralField G2;
  // T_j terms kept (closed form: 0) and geometric terms of 1/(1+y_x^2).
  int tj_terms = 0;
  int geometric_terms = 0;
  // B0 bounds on the truncated tails of F, G1, G2.
  double truncation_residual_F = 0.0;
  double truncation_residual_G1 = 0.0;
  double truncation_residual_G2 = 0.0;
};

NonlinearEval eval_nonlinear(const SpectralField& y_x, const SpectralField& omega, const PhysParams& params,
                             NonlinearBackend backend, const SeriesOptions& options = {});

SpectralField eval_F(const SpectralField& y_x, const SpectralField& omega, NonlinearBackend backend,
                     const SeriesOptions& options = {});
SpectralField eval_G1(const SpectralField& y_x, const SpectralField& omega, const PhysParams& params,
                      NonlinearBackend backend, const SeriesOptions& options = {});
SpectralField eval_G2(const SpectralField& y_x, const SpectralField& omega, const PhysParams& params,
                      NonlinearBackend backend, const SeriesOptions& options = {});

struct NonlinearTerms {
  SpectralField N1;
  SpectralField G1;
  SpectralField G2;
};

// N1 = F_x; G1 and G2 are returned separately since (G1)_t is handled by
// integration by parts in the Duhamel integrals.
NonlinearTerms eval_N(const SpectralField& y_x, const SpectralField& omega, const PhysParams& params,
                      NonlinearBackend backend = NonlinearBackend::ClosedForm, const SeriesOptions& options = {});

struct DifferenceCheck {
  double lhs_F = 0.0;
  double lhs_G = 0.0;  // |G1 difference|_rho + |G2 difference|_rho
  double rhs_F = 0.0;
  double rhs_G = 0.0;
  double mu_mass = 0.0;
  double nu_mass = 0.0;
  bool holds = true;
};

// Weighted differences of F and G between two states against the majorant
// obtained by summing the per-term T_j bounds over the series.
DifferenceCheck dr_difference_check(const std::pair<SpectralField, SpectralField>& state1,
                                    const std::pair<SpectralField, SpectralField>& state2,
                                    const PhysParams& params, double rho);

}  // namespace vsheet
