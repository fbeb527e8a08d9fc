#include "vsheet/nonlinear.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "vsheet/error.hpp"
#include "vsheet/spectral.hpp"

namespace vsheet {
namespace {

using Samples = std::vector<double>;

// Power series of num(p)/den(p) up to degree n (exact for the small integer
// polynomials used here).
std::vector<double> series_quotient(std::vector<double> num, const std::vector<double>& den, int n) {
  std::vector<double> q(n + 1, 0.0);
  num.resize(n + 1, 0.0);
  for (int j = 0; j <= n; ++j) {
    double c = num[j];
    for (int i = 1; i <= j && i < static_cast<int>(den.size()); ++i) c -= den[i] * q[j - i];
    q[j] = c / den[0];
  }
  return q;
}

double tj_majorant_sum(double r, double u, int from) {
  // sum_{j >= from} (1+2j) r^j u
  if (r == 0.0) return from == 0 ? u : 0.0;
  const double rm = std::pow(r, from);
  return u * rm * ((1.0 + 2.0 * from) / (1.0 - r) + 2.0 * r / ((1.0 - r) * (1.0 - r)));
}

struct Grid {
  Samples yx, om, hy, hom;
};

Grid sample_inputs(const SpectralField& y_x, const SpectralField& omega) {
  return {synthesize(y_x), synthesize(omega), synthesize(apply_multiplier(y_x, Symbol::Hilbert)),
          synthesize(apply_multiplier(omega, Symbol::Hilbert))};
}

// Assembles F, G1, G2 from grid samples of v1, v2 and 1/(1+y_x^2).
void assemble(const FrequencyGrid& grid, const Grid& s, const Samples& v1, const Samples& v2,
              const Samples& inv, double a, NonlinearEval& out) {
  const int n = grid.n_modes();
  Samples f(n), g1(n), g2(n);
  for (int i = 0; i < n; ++i) {
    const double w1 = 1.0 + s.om[i];
    f[i] = -v1[i] * s.yx[i] + (v2[i] - s.hom[i]);
    g1[i] = a * (v1[i] + s.hy[i] + v2[i] * s.yx[i]);
    g2[i] = -v1[i] * w1 - s.hy[i] + a * v1[i] * (v1[i] + v2[i] * s.yx[i]) +
            a * (0.5 * w1 * w1 * inv[i] - s.om[i] - 0.5 - 0.5 * v1[i] * v1[i] - 0.5 * v2[i] * v2[i]);
  }
  out.F = analyze(grid, f);
  out.G1 = analyze(grid, g1);
  out.G2 = analyze(grid, g2);
}

void validate_inputs(const SpectralField& y_x, const SpectralField& omega) {
  require_same_grid(y_x, omega);
  require(std::abs(y_x[0]) <= 1e-12 * std::max(1.0, b0_norm(y_x)), ErrorKind::InvalidArgument,
          "y_x must have zero mean");
}

NonlinearEval closed_form(const SpectralField& y_x, const SpectralField& omega, double a,
                          const OperatorConfig& op) {
  const auto& grid = y_x.grid();
  const Grid s = sample_inputs(y_x, omega);
  const Velocity v = biot_savart(y_x, omega, op);
  Samples inv(grid.n_modes());
  for (int i = 0; i < grid.n_modes(); ++i) inv[i] = 1.0 / (1.0 + s.yx[i] * s.yx[i]);
  NonlinearEval out{SpectralField(grid), SpectralField(grid), SpectralField(grid)};
  assemble(grid, s, synthesize(v.v1), synthesize(v.v2), inv, a, out);
  return out;
}

NonlinearEval series_form(const SpectralField& y_x, const SpectralField& omega, double a,
                          const SeriesOptions& options) {
  const auto& grid = y_x.grid();
  const int n = grid.n_modes();
  const double r = b0_norm(y_x);
  require(r < 1.0, ErrorKind::SeriesDivergence, "series backend needs |y_x|_B0 < 1");
  const SpectralField one_plus = SpectralField::constant(grid, 1.0) + omega;
  const double u = b0_norm(one_plus);
  const double v_bound = tj_majorant_sum(r, u, 0);

  NonlinearEval out{SpectralField(grid), SpectralField(grid), SpectralField(grid)};
  int terms = 1;
  for (;; ++terms) {
    require(terms <= options.max_terms, ErrorKind::SeriesDivergence, "series did not reach tolerance");
    const double t = tj_majorant_sum(r, u, terms);
    out.truncation_residual_F = t;
    out.truncation_residual_G1 = std::abs(a) * t;
    out.truncation_residual_G2 = u * t + std::abs(a) * t * (2.0 * v_bound + t) * (2.0 + r);
    if (std::max({out.truncation_residual_F, out.truncation_residual_G1, out.truncation_residual_G2}) <=
        0.5 * options.tol)
      break;
  }
  int geo = 0;
  double geo_res = 0.0;
  for (;; ++geo) {
    geo_res = std::abs(a) * 0.5 * u * u * std::pow(r, 2.0 * (geo + 1)) / (1.0 - r * r);
    if (geo_res <= 0.5 * options.tol) break;
    require(geo <= options.max_terms, ErrorKind::SeriesDivergence, "geometric series did not converge");
  }
  out.truncation_residual_G2 += geo_res;
  out.tj_terms = terms;
  out.geometric_terms = geo + 1;

  // v1 + i v2 = (i/pi) p.v. int (1 + i p)/(1 + p^2) (1+omega(x'))/(x-x') dx' with
  // p^j/(x-x') -> T_j: v2 from 1/(1+p^2), v1 from -p/(1+p^2).
  const int top = terms - 1;
  const auto c_even = series_quotient({1.0}, {1.0, 0.0, 1.0}, top);
  const auto c_odd = series_quotient({0.0, 1.0}, {1.0, 0.0, 1.0}, top);
  OperatorConfig op = options.op;
  op.j_max = std::max(op.j_max, top);
  SpectralField v1(grid), v2(grid);
  for (int j = 0; j <= top; ++j) {
    if (c_even[j] == 0.0 && c_odd[j] == 0.0) continue;
    const SpectralField tj = tj_apply(y_x, one_plus, j, options.tj_backend, op);
    if (c_even[j] != 0.0) v2 += c_even[j] * tj;
    if (c_odd[j] != 0.0) v1 -= c_odd[j] * tj;
  }

  const Grid s = sample_inputs(y_x, omega);
  const auto geo_coeff = series_quotient({1.0}, {1.0, 1.0}, geo);  // 1/(1+q), q = y_x^2
  Samples inv(n);
  for (int i = 0; i < n; ++i) {
    const double q = s.yx[i] * s.yx[i];
    double acc = 0.0, qn = 1.0;
    for (int m = 0; m <= geo; ++m, qn *= q) acc += geo_coeff[m] * qn;
    inv[i] = acc;
  }
  assemble(grid, s, synthesize(v1), synthesize(v2), inv, a, out);
  return out;
}

// (bound on the norm of a quantity for both states, bound on its difference)
struct Dual {
  double val = 0.0;
  double diff = 0.0;
};

Dual operator+(Dual x, Dual y) { return {x.val + y.val, x.diff + y.diff}; }
Dual operator*(Dual x, Dual y) { return {x.val * y.val, x.diff * y.val + x.val * y.diff}; }
Dual operator*(double s, Dual x) { return {s * x.val, s * x.diff}; }

// Bounds for T_j(y) u and its difference: (1+2j) M^j U and
// c(j) (M^{j-1} U dY + M^j dU).
Dual tj_dual(int j, Dual y, Dual u) {
  if (j == 0) return u;
  const double mj1 = std::pow(y.val, j - 1);
  return {(1.0 + 2.0 * j) * mj1 * y.val * u.val,
          difference_constant(j) * (mj1 * u.val * y.diff + mj1 * y.val * u.diff)};
}

// Sum of tj_dual over j = first, first+2, ... with a geometric tail bound.
Dual tj_dual_series(int first, Dual y, Dual u) {
  Dual acc;
  int j = first;
  for (;; j += 2) {
    const Dual term = tj_dual(j, y, u);
    acc = acc + term;
    if (j >= first + 4 && j > 4) {
      // term ratios over a step of 2 are bounded by their value at j
      const double qv = y.val * y.val * (5.0 + 2.0 * j) / (1.0 + 2.0 * j);
      const double qd = y.val * y.val * difference_constant(j + 2) / difference_constant(j);
      if (qv < 0.5 && qd < 0.5 && term.val <= 1e-17 * acc.val && term.diff <= 1e-17 * acc.diff) {
        acc.val += term.val * qv / (1.0 - qv);
        acc.diff += term.diff * qd / (1.0 - qd);
        return acc;
      }
    }
    require(j < 4000, ErrorKind::SeriesDivergence, "majorant series did not converge");
  }
}

}  // namespace

NonlinearEval eval_nonlinear(const SpectralField& y_x, const SpectralField& omega, const PhysParams& params,
                             NonlinearBackend backend, const SeriesOptions& options) {
  validate_inputs(y_x, omega);
  if (backend == NonlinearBackend::ClosedForm) return closed_form(y_x, omega, params.atwood, options.op);
  return series_form(y_x, omega, params.atwood, options);
}

SpectralField eval_F(const SpectralField& y_x, const SpectralField& omega, NonlinearBackend backend,
                     const SeriesOptions& options) {
  return eval_nonlinear(y_x, omega, PhysParams{}, backend, options).F;
}

SpectralField eval_G1(const SpectralField& y_x, const SpectralField& omega, const PhysParams& params,
                      NonlinearBackend backend, const SeriesOptions& options) {
  return eval_nonlinear(y_x, omega, params, backend, options).G1;
}

SpectralField eval_G2(const SpectralField& y_x, const SpectralField& omega, const PhysParams& params,
                      NonlinearBackend backend, const SeriesOptions& options) {
  return eval_nonlinear(y_x, omega, params, backend, options).G2;
}

NonlinearTerms eval_N(const SpectralField& y_x, const SpectralField& omega, const PhysParams& params,
                      NonlinearBackend backend, const SeriesOptions& options) {
  auto e = eval_nonlinear(y_x, omega, params, backend, options);
  return {derivative(e.F), std::move(e.G1), std::move(e.G2)};
}

DifferenceCheck dr_difference_check(const std::pair<SpectralField, SpectralField>& state1,
                                    const std::pair<SpectralField, SpectralField>& state2,
                                    const PhysParams& params, double rho) {
  const auto& [y1, w1] = state1;
  const auto& [y2, w2] = state2;
  require_same_grid(y1, y2);
  require_same_grid(w1, w2);
  require_same_grid(y1, w1);
  const auto& grid = y1.grid();
  DifferenceCheck r;
  for (int k = grid.k_min(); k <= grid.k_max(); ++k) {
    const double w = std::exp(rho * std::abs(grid.frequency(k)));
    r.mu_mass += w * std::max({std::abs(y1[k]), std::abs(y2[k]), std::abs(w1[k]), std::abs(w2[k])});
    r.nu_mass += w * std::max(std::abs(y1[k] - y2[k]), std::abs(w1[k] - w2[k]));
  }
  require(r.mu_mass < 1.0, ErrorKind::SeriesDivergence, "dominating measure must have mass < 1");

  const auto e1 = eval_nonlinear(y1, w1, params, NonlinearBackend::ClosedForm);
  const auto e2 = eval_nonlinear(y2, w2, params, NonlinearBackend::ClosedForm);
  r.lhs_F = brho_norm(e1.F - e2.F, rho);
  r.lhs_G = brho_norm(e1.G1 - e2.G1, rho) + brho_norm(e1.G2 - e2.G2, rho);

  const double a = std::abs(params.atwood);
  const Dual Y{r.mu_mass, r.nu_mass};
  const Dual W = Y;
  const Dual W1{1.0 + r.mu_mass, r.nu_mass};
  const Dual V1 = tj_dual_series(1, Y, W1);
  const Dual V2 = tj_dual_series(0, Y, W1);
  const Dual V2m = tj_dual_series(2, Y, W1);                    // v2 - H omega
  const Dual V1p = tj_dual(1, Y, W) + tj_dual_series(3, Y, W1);  // v1 + H y_x
  const double m2 = Y.val * Y.val;
  const Dual geo{m2 / (1.0 - m2), 2.0 * Y.val * Y.diff / ((1.0 - m2) * (1.0 - m2))};  // sum_{n>=1} y^{2n}

  const Dual F = V2m + V1 * Y;
  const Dual G1 = a * (V1p + V2 * Y);
  const Dual G2 = W * V1 + V1p +
                  a * (V1 * V1 + V1 * V2 * Y + 0.5 * (W1 * W1 * geo) + W * W + 0.5 * (V1 * V1) +
                       0.5 * (V2m * V2m) + W * V2m);
  r.rhs_F = F.diff;
  r.rhs_G = G1.diff + G2.diff;
  r.holds = r.lhs_F <= r.rhs_F * (1.0 + kBoundSlack) + 1e-15 && r.lhs_G <= r.rhs_G * (1.0 + kBoundSlack) + 1e-15;
  return r;
}

}  // namespace vsheet
