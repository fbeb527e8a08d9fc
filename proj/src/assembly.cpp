#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "vsheet/csv.hpp"
#include "vsheet/error.hpp"
#include "vsheet/spectral.hpp"
#include "vsheet/time_evolution.hpp"

namespace vsheet {
namespace {

constexpr cplx kI(0.0, 1.0);

struct Inputs {
  const SpectralField& y0x;
  const SpaceTimeField& F;
  const SpaceTimeField& G1;
  const SpaceTimeField& G2;
};

void validate(const Inputs& in) {
  for (const SpaceTimeField* f : {&in.G1, &in.G2}) {
    require(f->grid() == in.F.grid(), ErrorKind::GridMismatch, "forcing fields on different grids");
    require(f->times() == in.F.times(), ErrorKind::GridMismatch, "forcing fields on different time grids");
  }
  require(in.y0x.grid() == in.F.grid(), ErrorKind::GridMismatch, "initial data and forcing on different grids");
  require(std::abs(in.y0x[0]) <= 1e-12 * std::max(1.0, b0_norm(in.y0x)), ErrorKind::InvalidArgument,
          "initial y_x must have zero mean");
}

AssemblyResult empty_result(const FrequencyGrid& grid, const TimeGrid& times) {
  return {SpaceTimeField(grid, times), SpaceTimeField(grid, times), SpaceTimeField(grid, times),
          SpaceTimeField(grid, times), SpectralField(grid)};
}

// (-m + i a s, -1; -m - i a s, 1) with s = sgn xi.
std::pair<cplx, cplx> diagonal_rows(double xi, const PhysParams& params) {
  const cplx m = symbol_m(xi, params);
  const double s = xi > 0 ? 1.0 : -1.0;
  return {-m + kI * params.atwood * s, -m - kI * params.atwood * s};
}

void zero_mode(const Inputs& in, AssemblyResult& r) {
  for (int n = 0; n < r.omega.size(); ++n) {
    const cplx w = in.G1[n][0];
    r.omega[n][0] = w;
    r.u_plus[n][0] = -w;
    r.u_minus[n][0] = w;
  }
  r.omega0_prescribed[0] = in.G1[0][0];
}

// Diagonal representation at one mode. chi / dchi (optional) cut the forcing
// off in time. Returns the tail bound of this mode in the V variables.
double diagonal_mode(int k, const Inputs& in, const PhysParams& params, const std::vector<double>* chi,
                     const std::vector<double>* dchi, AssemblyResult& r) {
  const auto& times = in.F.times();
  const int nt = times.size();
  const double xi = in.F.grid().frequency(k);
  const cplx m = symbol_m(xi, params);
  const double s = xi > 0 ? 1.0 : -1.0;
  const double a = params.atwood;
  const cplx lp = eigenvalue(xi, Branch::Plus, params);
  const cplx lm = eigenvalue(xi, Branch::Minus, params);

  std::vector<cplx> g1(nt), qp(nt), qm(nt);
  for (int n = 0; n < nt; ++n) {
    const double c = chi ? (*chi)[n] : 1.0;
    const cplx extra = dchi ? -(*dchi)[n] * in.G1[n][k] : cplx(0.0);
    const cplx f = c * in.F[n][k], g2 = c * in.G2[n][k];
    g1[n] = c * in.G1[n][k];
    // N2 + m N1 and N2 - m N1 with (G1)_t integrated by parts
    qp[n] = kI * xi * (g2 + m * f) + lp * g1[n] + extra;
    qm[n] = kI * xi * (g2 - m * f) + lm * g1[n] + extra;
  }
  const auto ip = integrate_backward(lp, times, qp);
  const auto im = integrate_forward(lm, times, qm);
  const cplx y0 = in.y0x[k];
  const cplx up0 = ip[0] - g1[0];
  const cplx w0 = (-m + kI * a * s) * y0 - up0;
  const cplx um0 = -2.0 * m * y0 - up0;
  r.omega0_prescribed[k] = w0;
  for (int n = 0; n < nt; ++n) {
    const cplx up = ip[n] - g1[n];
    const cplx um = std::exp(times[n] * lm) * (um0 - g1[0]) + im[n] + g1[n];
    r.u_plus[n][k] = up;
    r.u_minus[n][k] = um;
    r.y_x[n][k] = -(up + um) / (2.0 * m);
    r.omega[n][k] = -((m + kI * a * s) * up + (-m + kI * a * s) * um) / (2.0 * m);
  }
  const double tail = std::abs(qp[nt - 1]) / (lp.real() + params.alpha * std::abs(xi));
  return tail * (1.0 + std::abs(m) + std::abs(a)) / (2.0 * std::abs(m));
}

// Direct Duhamel formula with exp((t-s)A) and piecewise-linear forcing.
void matrix_mode(int k, const Inputs& in, const SpectralField& omega0, const PhysParams& params,
                 AssemblyResult& r) {
  const auto& times = in.F.times();
  const int nt = times.size();
  const double xi = in.F.grid().frequency(k);
  const double ax = std::abs(xi);
  const double a = params.atwood;
  const Matrix2c A = symbol_matrix(xi, params);
  using Vec = Eigen::Vector2cd;

  std::vector<Vec> q(nt);
  for (int n = 0; n < nt; ++n) {
    const cplx f = in.F[n][k], g1 = in.G1[n][k], g2 = in.G2[n][k];
    // (N1, N2 - a H N1) with (G1)_t moved onto A (0, G1)
    q[n] = Vec(kI * xi * f, kI * xi * g2 - a * ax * f) + A * Vec(0.0, g1);
  }
  Vec p(in.y0x[k], omega0[k] - in.G1[0][k]);
  Vec w = Vec::Zero();
  Eigen::Matrix<cplx, 6, 6> block = Eigen::Matrix<cplx, 6, 6>::Zero();
  auto store = [&](int n) {
    const Vec v = p + Vec(0.0, in.G1[n][k]) + w;
    r.y_x[n][k] = v(0);
    r.omega[n][k] = v(1);
  };
  store(0);
  r.omega0_prescribed[k] = omega0[k];
  for (int n = 0; n + 1 < nt; ++n) {
    const double dt = times[n + 1] - times[n];
    block.setZero();
    block.block<2, 2>(0, 0) = dt * A;
    block.block<2, 2>(0, 2) = dt * Matrix2c::Identity();
    block.block<2, 2>(2, 4) = dt * Matrix2c::Identity();
    const Eigen::Matrix<cplx, 6, 6> e = block.exp();
    // exp(block) = [[E, int_0^dt e^{(dt-s)A} ds, int_0^dt e^{(dt-s)A} s ds], ...]
    const Matrix2c E = matrix_exp_A(xi, dt, params);
    const Matrix2c w0 = e.block<2, 2>(0, 2);
    const Matrix2c w1 = e.block<2, 2>(0, 4) / dt;
    w = E * w + w0 * q[n] + w1 * (q[n + 1] - q[n]);
    p = E * p;
    store(n + 1);
  }
}

void fill_diagonal_from_v(int k, const PhysParams& params, AssemblyResult& r) {
  const auto [row_p, row_m] = diagonal_rows(r.y_x.grid().frequency(k), params);
  for (int n = 0; n < r.y_x.size(); ++n) {
    r.u_plus[n][k] = row_p * r.y_x[n][k] - r.omega[n][k];
    r.u_minus[n][k] = row_m * r.y_x[n][k] + r.omega[n][k];
  }
}

}  // namespace

double split_frequency(const PhysParams& params) {
  const double a = params.atwood;
  return 2.0 * a * params.gravity / (1.0 - a * a);
}

std::pair<SpectralField, SpectralField> to_diagonal(const SpectralField& y_x, const SpectralField& omega,
                                                    const PhysParams& params) {
  require_same_grid(y_x, omega);
  const auto& grid = y_x.grid();
  SpectralField up(grid), um(grid);
  for (int k = grid.k_min() + 1; k <= grid.k_max(); ++k) {
    if (k == 0) {
      up[0] = -omega[0];
      um[0] = omega[0];
      continue;
    }
    const auto [row_p, row_m] = diagonal_rows(grid.frequency(k), params);
    up[k] = row_p * y_x[k] - omega[k];
    um[k] = row_m * y_x[k] + omega[k];
  }
  return {up, um};
}

AssemblyResult assemble_apos(const SpectralField& y0x, const SpaceTimeField& F, const SpaceTimeField& G1,
                             const SpaceTimeField& G2, const PhysParams& params, const AssemblyOptions& options) {
  require(params.atwood >= 0.0, ErrorKind::InvalidArgument, "global assembly needs a >= 0");
  const Inputs in{y0x, F, G1, G2};
  validate(in);
  const auto& grid = F.grid();
  AssemblyResult r = empty_result(grid, F.times());
  zero_mode(in, r);
  std::vector<double> tails(grid.n_modes(), 0.0);
  parallel_for(grid.n_modes(), options.exec, [&](int idx) {
    const int k = grid.mode(idx);
    if (k == 0 || grid.excluded(k)) return;
    tails[idx] = diagonal_mode(k, in, params, nullptr, nullptr, r);
  });
  for (double t : tails) r.tail_estimate += t;
  r.high_modes = grid.n_modes() - 2;
  r.valid_until = F.times().t_max();
  require(r.tail_estimate <= options.tail_tol, ErrorKind::TailTolerance,
          "I^+ tail estimate " + format_double(r.tail_estimate) + " exceeds tolerance; increase t_max");
  return r;
}

AssemblyResult assemble_aneg(const SpectralField& y0x, const SpectralField& omega0, const SpaceTimeField& F,
                             const SpaceTimeField& G1, const SpaceTimeField& G2, double T, const PhysParams& params,
                             const AssemblyOptions& options) {
  require(params.atwood < 0.0 && params.gravity < 0.0, ErrorKind::InvalidArgument,
          "local assembly needs a < 0 and g < 0");
  require(T > 0.0, ErrorKind::InvalidArgument, "horizon T must be positive");
  const Inputs in{y0x, F, G1, G2};
  validate(in);
  require_same_grid(y0x, omega0);
  const auto& grid = F.grid();
  const auto& times = F.times();
  require(times.t_max() >= 2.0 * T * (1.0 - 1e-12), ErrorKind::Configuration,
          "time grid must cover the cutoff support [0, 2T]");
  const double xc = split_frequency(params);
  int low = 0, high = 0;
  for (int k = 1; k <= grid.k_max(); ++k) (grid.frequency(k) <= xc ? low : high)++;
  require(low > 0 && high > 0, ErrorKind::Configuration,
          "grid does not resolve both sides of the split frequency " + std::to_string(xc));

  std::vector<double> chi(times.size()), dchi(times.size());
  for (int n = 0; n < times.size(); ++n) {
    chi[n] = cutoff_chi(times[n], T);
    dchi[n] = cutoff_chi_derivative(times[n], T);
  }
  AssemblyResult r = empty_result(grid, times);
  zero_mode(in, r);
  std::vector<double> tails(grid.n_modes(), 0.0);
  parallel_for(grid.n_modes(), options.exec, [&](int idx) {
    const int k = grid.mode(idx);
    if (k == 0 || grid.excluded(k)) return;
    if (std::abs(grid.frequency(k)) <= xc) {
      matrix_mode(k, in, omega0, params, r);
      fill_diagonal_from_v(k, params, r);
    } else {
      tails[idx] = diagonal_mode(k, in, params, &chi, &dchi, r);
    }
  });
  for (double t : tails) r.tail_estimate += t;
  r.low_modes = 2 * low;
  r.high_modes = 2 * high - 1;
  r.valid_until = T;
  require(r.tail_estimate <= options.tail_tol, ErrorKind::TailTolerance,
          "tail estimate " + format_double(r.tail_estimate) + " exceeds tolerance");
  return r;
}

}  // namespace vsheet
