#include "vsheet/kernels.hpp"

#include <cmath>

#include "vsheet/error.hpp"

namespace vsheet {

std::vector<double> cot_derivative_polynomial(int n) {
  std::vector<double> p{0.0, 1.0};  // P_0(c) = c
  for (int step = 0; step < n; ++step) {
    // P_{n+1}(c) = -(1 + c^2) P_n'(c)
    std::vector<double> dp(p.size() > 1 ? p.size() - 1 : 1, 0.0);
    for (std::size_t i = 1; i < p.size(); ++i) dp[i - 1] = i * p[i];
    std::vector<double> next(dp.size() + 2, 0.0);
    for (std::size_t i = 0; i < dp.size(); ++i) {
      next[i] -= dp[i];
      next[i + 2] -= dp[i];
    }
    p = std::move(next);
  }
  return p;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

PeriodizedKernel::PeriodizedKernel(int order, double period_scale)
    : order_(order), scale_(period_scale), poly_(cot_derivative_polynomial(order)) {
  require(order >= 0, ErrorKind::InvalidArgument, "kernel order must be nonnegative");
  double fact = 1.0;
  for (int i = 2; i <= order; ++i) fact *= i;
  prefactor_ = ((order % 2 == 0) ? 1.0 : -1.0) / fact * std::pow(1.0 / (2.0 * period_scale), order + 1);
}

double PeriodizedKernel::operator()(double z) const {
  const double c = 1.0 / std::tan(z / (2.0 * scale_));
  double acc = 0.0;
  for (std::size_t i = poly_.size(); i-- > 0;) acc = acc * c + poly_[i];
  return prefactor_ * acc;
}

std::complex<double> complex_cot_kernel(std::complex<double> zeta, double period_scale) {
  const auto w = zeta / (2.0 * period_scale);
  return std::cos(w) / std::sin(w) / (2.0 * period_scale);
}

}  // namespace vsheet
