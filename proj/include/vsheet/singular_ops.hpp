#pragma once

#include <span>
#include <utility>
#include <vector>

#include "vsheet/field.hpp"
#include "vsheet/parallel.hpp"

namespace vsheet {

enum class Backend { Quadrature, Spectral };

struct OperatorConfig {
  int j_max = 10;
  // Spectral backend refuses when eps * (sum of binomial term norms) exceeds
  // this fraction of the (1+2j) |y_x|^j |u| scale.
  double cancellation_tol = 1e-9;
  // Relative amplitude below which a mode counts as outside the band.
  double band_rel_tol = 1e-14;
  Exec exec = Exec::Parallel;
};

// T_j(y_x) u = (1/pi) p.v. int (y(x)-y(x'))^j K_{j+1}(x-x') u(x') dx', with y
// the mean-zero antiderivative of y_x. T_0 is the Hilbert transform.
SpectralField tj_apply(const SpectralField& y_x, const SpectralField& u, int j, Backend backend,
                       const OperatorConfig& config = {});

// Tilde operators of the porous-medium problem:
// (1/pi) int (f(x)-f(x'))^j (u(x)-u(x')) K_{j+1}(x-x') dx', j >= 1.
SpectralField tilde_tj_apply(const SpectralField& f_x, const SpectralField& u, int j, Backend backend,
                             const OperatorConfig& config = {});

// R_k(y_1x..y_kx) Omega = (1/pi) int (1/k) d/dx[p_1...p_k](x,x') Omega(x') dx',
// p_i = (y_i(x)-y_i(x')) K_1(x-x'). Quadrature only.
SpectralField rk_apply(std::span<const SpectralField> y_list, const SpectralField& omega,
                       const OperatorConfig& config = {});

struct Velocity {
  SpectralField v1;
  SpectralField v2;
};

// Velocity of the sheet z(x) = x + i y(x) carrying vorticity density
// 2(1 + omega): v1 + i v2 = (i/2pi) p.v. int 2(1+omega(x')) conj(K(z(x)-z(x'))) dx'.
Velocity biot_savart(const SpectralField& y_x, const SpectralField& omega, const OperatorConfig& config = {});

struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = true;
  double margin() const { return rhs - lhs; }
};

// |e^{rho|xi|} F(T_j(y_x) u)| mass vs (1+2j) |y_x|_rho^j |u|_rho.
BoundCheck tj_norm_bound_check(const SpectralField& y_x, const SpectralField& u, int j, double rho,
                               Backend backend = Backend::Quadrature, const OperatorConfig& config = {});

// Difference estimate with c(j) = 2j^2+3j+1; mu dominates the four inputs,
// nu their differences (both weighted by e^{rho|xi|}).
BoundCheck tj_difference_bound_check(const SpectralField& y1x, const SpectralField& y2x,
                                     const SpectralField& u1, const SpectralField& u2, int j, double rho,
                                     Backend backend = Backend::Quadrature, const OperatorConfig& config = {});

// |e^{rho|xi|} F(R_k Omega)| mass vs 2 prod |y_ix|_rho |Omega|_{-rho}.
BoundCheck rk_bound_check(std::span<const SpectralField> y_list, const SpectralField& omega, double rho,
                          const OperatorConfig& config = {});

double difference_constant(int j);

// Relative slack allowed in the numerical inequality checks.
inline constexpr double kBoundSlack = 1e-6;

}  // namespace vsheet
