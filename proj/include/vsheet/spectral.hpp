#pragma once

#include <optional>
#include <span>
#include <vector>

#include "vsheet/field.hpp"
#include "vsheet/grid.hpp"

namespace vsheet {

// Grid samples -> coefficients, c_k = (1/N) sum_j u(x_j) exp(-i xi_k x_j).
SpectralField analyze(const FrequencyGrid& grid, std::span<const double> samples);
// Complex samples -> coefficients without Hermitian projection.
std::vector<cplx> analyze_complex(const FrequencyGrid& grid, std::span<const cplx> samples);

// Values at the N grid points (FFT).
std::vector<double> synthesize(const SpectralField& field);
// Complex values at the grid points (no real part taken).
std::vector<cplx> synthesize_complex(const FrequencyGrid& grid, std::span<const cplx> coeffs);
// Values at arbitrary points by direct summation.
std::vector<double> synthesize(const SpectralField& field, std::span<const double> points);

enum class Symbol { Lambda, Hilbert, Dx, M, MInv, LambdaM };

// m(xi) = sqrt(1 - a^2 - a g / |xi|), continued as i sqrt(|.|) when the
// radicand is negative.
cplx symbol_m(double xi, const PhysParams& params);
cplx symbol_value(Symbol symbol, double xi, const PhysParams* params);

// Multiplies c_k by the symbol at xi_k. Lambda, Hilbert, Dx and LambdaM
// annihilate the zero mode; M and MInv are defined as 0 there.
SpectralField apply_multiplier(const SpectralField& field, Symbol symbol, const PhysParams* params = nullptr);

// Mean-zero antiderivative: c_k / (i xi_k), zero mode -> 0.
SpectralField antiderivative(const SpectralField& field);
// j-th derivative.
SpectralField derivative(const SpectralField& field, int order = 1);

// Pointwise product evaluated on the grid (circular convolution of the
// coefficients, aliasing folded back onto the grid).
SpectralField pointwise_product(const SpectralField& u, const SpectralField& v);

double b0_norm(const SpectralField& u);
double brho_norm(const SpectralField& u, double rho);
// sum_k exp(weight |xi_k|) |c_k| for any real weight (negative allowed).
double weighted_norm(const SpectralField& u, double weight);
// Maximum of |u(x_j)| over the grid.
double sup_norm(const SpectralField& u);

DominatingMeasure dominating_measure(const SpaceTimeField& u, double alpha);
double balpha_norm(const SpaceTimeField& u, double alpha);
// Dominating measure of a vector-valued space-time field (sum of components).
DominatingMeasure dominating_measure(std::span<const SpaceTimeField* const> components, double alpha);

// Largest |k| with |c_k| > rel_tol * max|c|; 0 for the zero field.
int effective_band(const SpectralField& u, double rel_tol = 1e-14);

struct AnalyticityFitOptions {
  double floor = 1e-14;
  int k_low = 1;
  std::optional<int> k_high;
};

// Least-squares slope of log|c_k| against |xi_k| over positive modes above
// the amplitude floor; returns max(0, -slope).
double analyticity_fit(const SpectralField& u, const AnalyticityFitOptions& options = {});

}  // namespace vsheet
