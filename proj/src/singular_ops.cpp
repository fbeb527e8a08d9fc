#include "vsheet/singular_ops.hpp"

#include <algorithm>
#include <cmath>
#include <atomic>
#include <limits>
#include <numbers>

#include "vsheet/error.hpp"
#include "vsheet/kernels.hpp"
#include "vsheet/spectral.hpp"

namespace vsheet {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

void require_mean_zero(const SpectralField& f, const char* name) {
  require(std::abs(f[0]) <= 1e-12 * std::max(1.0, b0_norm(f)), ErrorKind::InvalidArgument,
          std::string(name) + " must have zero mean so its antiderivative is periodic");
}

// K_{order+1}(d h) for offsets d = 0..N-1 (entry 0 unused).
std::vector<double> kernel_table(const FrequencyGrid& grid, int order) {
  const PeriodizedKernel kernel(order, grid.period_scale());
  std::vector<double> table(grid.n_modes(), 0.0);
  for (int d = 1; d < grid.n_modes(); ++d) table[d] = kernel(d * grid.spacing());
  return table;
}

void check_order(int j, const OperatorConfig& config, int min_order) {
  require(j >= min_order, ErrorKind::InvalidArgument, "operator order out of range");
  require(j <= config.j_max, ErrorKind::BackendCapacity,
          "order j = " + std::to_string(j) + " exceeds j_max = " + std::to_string(config.j_max));
}

// Symbol of ((-1)^j / j!) d^j/dx^j H.
SpectralField apply_kernel_symbol(const SpectralField& w, int j) {
  const auto& grid = w.grid();
  double fact = 1.0;
  for (int i = 2; i <= j; ++i) fact *= i;
  const double sign = (j % 2 == 0) ? 1.0 : -1.0;
  SpectralField out(grid);
  for (int k = grid.k_min() + 1; k <= grid.k_max(); ++k) {
    if (k == 0) continue;
    const double xi = grid.frequency(k);
    const cplx sym = sign / fact * std::pow(cplx(0.0, xi), j) * cplx(0.0, xi > 0 ? -1.0 : 1.0);
    out[k] = w[k] * sym;
  }
  return out;
}

void check_band(const SpectralField& y_x, const SpectralField& u, int j, const OperatorConfig& config) {
  const int by = effective_band(y_x, config.band_rel_tol);
  const int bu = effective_band(u, config.band_rel_tol);
  const int limit = y_x.grid().n_modes() / 2 - 1;
  require(j * by + bu <= limit, ErrorKind::BandLimit,
          "spectral backend needs j*band(y_x) + band(u) <= N/2-1; got " + std::to_string(j) + "*" +
              std::to_string(by) + " + " + std::to_string(bu) + " > " + std::to_string(limit));
}

SpectralField tj_spectral(const SpectralField& y_x, const SpectralField& u, int j, const OperatorConfig& config) {
  const auto& grid = y_x.grid();
  if (j == 0) return apply_multiplier(u, Symbol::Hilbert);
  check_band(y_x, u, j, config);
  const SpectralField y = antiderivative(y_x);
  std::vector<SpectralField> ypow{SpectralField::constant(grid, 1.0)};
  for (int m = 1; m <= j; ++m) ypow.push_back(pointwise_product(ypow.back(), y));

  SpectralField sum(grid);
  double term_mass = 0.0;
  for (int m = 0; m <= j; ++m) {
    const double coef = binomial(j, m) * (((j - m) % 2 == 0) ? 1.0 : -1.0);
    const SpectralField inner = apply_kernel_symbol(pointwise_product(ypow[j - m], u), j);
    SpectralField term = pointwise_product(ypow[m], inner);
    term *= coef;
    term_mass += b0_norm(term);
    sum += term;
  }
  const double scale = (1.0 + 2.0 * j) * ipow(b0_norm(y_x), j) * b0_norm(u);
  if (scale > 0.0) {
    const double loss = kEps * term_mass / scale;
    require(loss <= config.cancellation_tol, ErrorKind::BackendCapacity,
            "binomial cancellation loss " + std::to_string(loss) + " exceeds tolerance at j = " + std::to_string(j));
  }
  return sum;
}

SpectralField tj_quadrature(const SpectralField& y_x, const SpectralField& u, int j, const OperatorConfig& config) {
  const auto& grid = y_x.grid();
  const int n = grid.n_modes();
  const auto y = synthesize(antiderivative(y_x));
  const auto uv = synthesize(u);
  const auto kern = kernel_table(grid, j);
  const double weight = 2.0 * grid.spacing() / std::numbers::pi;
  std::vector<double> out(n);
  parallel_for(n, config.exec, [&](int i) {
    double acc = 0.0;
    // alternating-point rule: nodes of opposite parity to the target
    for (int l = (i + 1) % 2; l < n; l += 2) {
      const int d = (i - l + n) % n;
      acc += ipow(y[i] - y[l], j) * kern[d] * uv[l];
    }
    out[i] = weight * acc;
  });
  return analyze(grid, out);
}

}  // namespace

double difference_constant(int j) { return 2.0 * j * j + 3.0 * j + 1.0; }

SpectralField tj_apply(const SpectralField& y_x, const SpectralField& u, int j, Backend backend,
                       const OperatorConfig& config) {
  require_same_grid(y_x, u);
  check_order(j, config, 0);
  require_mean_zero(y_x, "y_x");
  return backend == Backend::Spectral ? tj_spectral(y_x, u, j, config) : tj_quadrature(y_x, u, j, config);
}

SpectralField tilde_tj_apply(const SpectralField& f_x, const SpectralField& u, int j, Backend backend,
                             const OperatorConfig& config) {
  require_same_grid(f_x, u);
  check_order(j, config, 1);
  require_mean_zero(f_x, "f_x");
  const auto& grid = f_x.grid();
  if (backend == Backend::Spectral) {
    // (f-f')^j (u-u') = u (f-f')^j - (f-f')^j u'
    const SpectralField one = SpectralField::constant(grid, 1.0);
    return pointwise_product(u, tj_spectral(f_x, one, j, config)) - tj_spectral(f_x, u, j, config);
  }
  const int n = grid.n_modes();
  const auto f = synthesize(antiderivative(f_x));
  const auto fx = synthesize(f_x);
  const auto uv = synthesize(u);
  const auto ux = synthesize(derivative(u));
  const auto kern = kernel_table(grid, j);
  const double weight = grid.spacing() / std::numbers::pi;
  std::vector<double> out(n);
  parallel_for(n, config.exec, [&](int i) {
    double acc = ipow(fx[i], j) * ux[i];  // diagonal limit
    for (int l = 0; l < n; ++l) {
      if (l == i) continue;
      const int d = (i - l + n) % n;
      acc += ipow(f[i] - f[l], j) * (uv[i] - uv[l]) * kern[d];
    }
    out[i] = weight * acc;
  });
  return analyze(grid, out);
}

SpectralField rk_apply(std::span<const SpectralField> y_list, const SpectralField& omega,
                       const OperatorConfig& config) {
  require(!y_list.empty(), ErrorKind::InvalidArgument, "R_k needs at least one y_x");
  for (const auto& y : y_list) {
    require_same_grid(y, omega);
    require_mean_zero(y, "y_x");
  }
  const auto& grid = omega.grid();
  const int n = grid.n_modes();
  const int k = static_cast<int>(y_list.size());
  std::vector<std::vector<double>> y, yx, yxx;
  for (const auto& f : y_list) {
    y.push_back(synthesize(antiderivative(f)));
    yx.push_back(synthesize(f));
    yxx.push_back(synthesize(derivative(f)));
  }
  const auto om = synthesize(omega);
  const auto k1 = kernel_table(grid, 0);
  const double inv4l2 = 1.0 / (4.0 * grid.period_scale() * grid.period_scale());
  const double weight = grid.spacing() / (std::numbers::pi * k);
  std::vector<double> out(n);
  parallel_for(n, config.exec, [&](int i) {
    std::vector<double> p(k), dp(k);
    double acc = 0.0;
    for (int l = 0; l < n; ++l) {
      const int d = (i - l + n) % n;
      for (int m = 0; m < k; ++m) {
        if (d == 0) {
          p[m] = yx[m][i];
          dp[m] = 0.5 * yxx[m][i];
        } else {
          const double dy = y[m][i] - y[m][l];
          p[m] = dy * k1[d];
          dp[m] = (yx[m][i] - p[m]) * k1[d] - dy * inv4l2;
        }
      }
      double deriv = 0.0;
      for (int m = 0; m < k; ++m) {
        double prod = dp[m];
        for (int q = 0; q < k; ++q)
          if (q != m) prod *= p[q];
        deriv += prod;
      }
      acc += deriv * om[l];
    }
    out[i] = weight * acc;
  });
  return analyze(grid, out);
}

Velocity biot_savart(const SpectralField& y_x, const SpectralField& omega, const OperatorConfig& config) {
  require_same_grid(y_x, omega);
  require_mean_zero(y_x, "y_x");
  const auto& grid = y_x.grid();
  const int n = grid.n_modes();
  const double period = grid.period();
  const auto y = synthesize(antiderivative(y_x));
  const auto om = synthesize(omega);
  for (int i = 0; i < n; ++i)
    require(std::isfinite(y[i]) && std::isfinite(om[i]), ErrorKind::Geometry, "non-finite interface data");
  std::vector<double> v1(n), v2(n);
  std::atomic<bool> collision{false};
  const double weight = 2.0 * grid.spacing() / (2.0 * std::numbers::pi);
  parallel_for(n, config.exec, [&](int i) {
    // offsets +d and -d are summed together so the odd kernel cancels exactly on a flat sheet
    auto term = [&](int d) {
      const int l = ((i - d) % n + n) % n;
      const cplx zeta(d * grid.spacing(), y[i] - y[l]);
      const double gap = std::min({std::abs(zeta), std::abs(zeta - period), std::abs(zeta + period)});
      if (gap < 1e-10) collision = true;
      return 2.0 * (1.0 + om[l]) * std::conj(complex_cot_kernel(zeta, grid.period_scale()));
    };
    cplx acc = 0.0;
    for (int d = 1; 2 * d < n; d += 2) acc += term(d) + term(-d);
    if ((n / 2) % 2 == 1) acc += term(n / 2);
    const cplx v = cplx(0.0, 1.0) * weight * acc;
    v1[i] = v.real();
    v2[i] = v.imag();
  });
  require(!collision, ErrorKind::Geometry, "interface points closer than 1e-10");
  return {analyze(grid, v1), analyze(grid, v2)};
}

BoundCheck tj_norm_bound_check(const SpectralField& y_x, const SpectralField& u, int j, double rho,
                               Backend backend, const OperatorConfig& config) {
  const SpectralField t = tj_apply(y_x, u, j, backend, config);
  BoundCheck r;
  r.lhs = brho_norm(t, rho);
  r.rhs = (1.0 + 2.0 * j) * ipow(brho_norm(y_x, rho), j) * brho_norm(u, rho);
  r.holds = r.lhs <= r.rhs * (1.0 + kBoundSlack) + 1e-15;
  return r;
}

BoundCheck tj_difference_bound_check(const SpectralField& y1x, const SpectralField& y2x,
                                     const SpectralField& u1, const SpectralField& u2, int j, double rho,
                                     Backend backend, const OperatorConfig& config) {
  require(j >= 1, ErrorKind::InvalidArgument, "difference bound needs j >= 1");
  const auto& grid = y1x.grid();
  double mu = 0.0, nu = 0.0;
  for (int k = grid.k_min(); k <= grid.k_max(); ++k) {
    const double w = std::exp(rho * std::abs(grid.frequency(k)));
    mu += w * std::max({std::abs(y1x[k]), std::abs(y2x[k]), std::abs(u1[k]), std::abs(u2[k])});
    nu += w * std::max(std::abs(y1x[k] - y2x[k]), std::abs(u1[k] - u2[k]));
  }
  const SpectralField diff = tj_apply(y1x, u1, j, backend, config) - tj_apply(y2x, u2, j, backend, config);
  BoundCheck r;
  r.lhs = brho_norm(diff, rho);
  r.rhs = difference_constant(j) * (ipow(mu, j - 1) + ipow(mu, j)) * nu;
  r.holds = r.lhs <= r.rhs * (1.0 + kBoundSlack) + 1e-15;
  return r;
}

BoundCheck rk_bound_check(std::span<const SpectralField> y_list, const SpectralField& omega, double rho,
                          const OperatorConfig& config) {
  const SpectralField r_omega = rk_apply(y_list, omega, config);
  BoundCheck r;
  r.lhs = brho_norm(r_omega, rho);
  r.rhs = 2.0 * weighted_norm(omega, -rho);
  for (const auto& y : y_list) r.rhs *= brho_norm(y, rho);
  r.holds = r.lhs <= r.rhs * (1.0 + kBoundSlack) + 1e-15;
  return r;
}

}  // namespace vsheet
