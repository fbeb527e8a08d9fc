#pragma once

#include <complex>
#include <vector>

namespace vsheet {

// Periodized line kernel 1/z^{j+1} on a torus of length 2*pi*L:
//   K_{j+1}(z) = ((-1)^j / j!) d^j/dz^j [ (1/(2L)) cot(z/(2L)) ].
// Evaluated through the polynomial P_j(c) = d^j/dw^j cot(w) expressed in
// c = cot(w); P_j has terms of a single parity so large c is stable.
class PeriodizedKernel {
public:
  PeriodizedKernel(int order, double period_scale);

  int order() const noexcept { return order_; }
  double operator()(double z) const;

private:
  int order_;
  double scale_;
  double prefactor_;
  std::vector<double> poly_;  // coefficients of P_order in c
};

// (1/(2L)) cot(zeta/(2L)) for complex zeta.
std::complex<double> complex_cot_kernel(std::complex<double> zeta, double period_scale);

// Coefficients of d^n/dw^n cot(w) as a polynomial in cot(w).
std::vector<double> cot_derivative_polynomial(int n);

double binomial(int n, int k);

}  // namespace vsheet
