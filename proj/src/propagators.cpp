#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "vsheet/error.hpp"
#include "vsheet/spectral.hpp"
#include "vsheet/time_evolution.hpp"

namespace vsheet {
namespace {

constexpr cplx kI(0.0, 1.0);

// A0(z) = int_0^1 e^{z s} ds, A1(z) = int_0^1 s e^{z s} ds.
cplx phi0(cplx z) {
  if (std::abs(z) < 1.0) {
    cplx acc = 0.0, term = 1.0;
    for (int n = 0; n < 30; ++n) {
      acc += term / static_cast<double>(n + 1);
      term *= z / static_cast<double>(n + 1);
    }
    return acc;
  }
  return (std::exp(z) - 1.0) / z;
}

cplx phi1(cplx z) {
  if (std::abs(z) < 1.0) {
    cplx acc = 0.0, term = 1.0;
    for (int n = 0; n < 30; ++n) {
      acc += term / static_cast<double>(n + 2);
      term *= z / static_cast<double>(n + 1);
    }
    return acc;
  }
  return (std::exp(z) * (z - 1.0) + 1.0) / (z * z);
}

double bump(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }
double bump_derivative(double x) { return x > 0.0 ? std::exp(-1.0 / x) / (x * x) : 0.0; }

std::vector<cplx> mode_series(const SpaceTimeField& f, int k) {
  std::vector<cplx> out(f.size());
  for (int n = 0; n < f.size(); ++n) out[n] = f[n][k];
  return out;
}

}  // namespace

cplx eigenvalue(double xi, Branch branch, const PhysParams& params) {
  if (xi == 0.0) return 0.0;
  const cplx root = std::abs(xi) * symbol_m(xi, params);
  const cplx base = kI * params.atwood * xi;
  return branch == Branch::Plus ? base + root : base - root;
}

SpectralField semigroup_apply(const SpectralField& field, Branch branch, double dt, const PhysParams& params) {
  const auto& grid = field.grid();
  SpectralField out = field;
  for (int k = grid.k_min() + 1; k <= grid.k_max(); ++k) {
    if (k == 0) continue;
    const cplx factor = std::exp(dt * eigenvalue(grid.frequency(k), branch, params));
    require(std::abs(factor) <= 1.0 + 1e-12 || field[k] == cplx(0.0), ErrorKind::Stability,
            "semigroup applied in its growth direction (mode " + std::to_string(k) + ")");
    out[k] = factor * field[k];
  }
  return out;
}

Matrix2c symbol_matrix(double xi, const PhysParams& params) {
  const double a = params.atwood;
  const double ax = std::abs(xi);
  Matrix2c m;
  m << 0.0, ax, ax - a * params.gravity, 2.0 * a * kI * xi;
  return m;
}

Matrix2c matrix_exp_A(double xi, double t, const PhysParams& params) {
  const double a = params.atwood;
  const cplx tau = t * std::abs(xi) * symbol_m(xi, params);
  cplx ch, shc;
  if (std::abs(tau) < 1e-4) {
    const cplx t2 = tau * tau;
    ch = 1.0 + t2 / 2.0 + t2 * t2 / 24.0;
    shc = 1.0 + t2 / 6.0 + t2 * t2 / 120.0;
  } else {
    ch = std::cosh(tau);
    shc = std::sinh(tau) / tau;
  }
  const cplx shift = kI * a * xi;
  Matrix2c b = symbol_matrix(xi, params) - shift * Matrix2c::Identity();
  return std::exp(t * shift) * (ch * Matrix2c::Identity() + t * shc * b);
}

Matrix2c matrix_exp_reference(double xi, double t, const PhysParams& params) {
  const Matrix2c m = t * symbol_matrix(xi, params);
  return m.exp();
}

double cutoff_chi(double s, double T) {
  require(T > 0.0, ErrorKind::InvalidArgument, "cutoff horizon must be positive");
  const double x = s / T - 1.0;
  if (x <= 0.0) return 1.0;
  if (x >= 1.0) return 0.0;
  const double p = bump(x), q = bump(1.0 - x);
  return q / (p + q);
}

double cutoff_chi_derivative(double s, double T) {
  require(T > 0.0, ErrorKind::InvalidArgument, "cutoff horizon must be positive");
  const double x = s / T - 1.0;
  if (x <= 0.0 || x >= 1.0) return 0.0;
  const double p = bump(x), q = bump(1.0 - x);
  const double dp = bump_derivative(x), dq = -bump_derivative(1.0 - x);
  return (dq * p - q * dp) / ((p + q) * (p + q)) / T;
}

StepWeights forward_weights(cplx lambda, double dt) {
  const cplx z = dt * lambda;
  const cplx a0 = phi0(z), a1 = phi1(z);
  return {std::exp(z), dt * a1, dt * (a0 - a1)};
}

StepWeights backward_weights(cplx lambda, double dt) {
  const cplx z = -dt * lambda;
  const cplx a0 = phi0(z), a1 = phi1(z);
  return {std::exp(z), dt * (a0 - a1), dt * a1};
}

std::vector<cplx> integrate_forward(cplx lambda, const TimeGrid& times, std::span<const cplx> h) {
  require(static_cast<int>(h.size()) == times.size(), ErrorKind::GridMismatch, "forcing length != time grid");
  std::vector<cplx> out(h.size(), 0.0);
  for (int n = 0; n < times.steps(); ++n) {
    const auto w = forward_weights(lambda, times[n + 1] - times[n]);
    out[n + 1] = w.decay * out[n] + w.left * h[n] + w.right * h[n + 1];
  }
  return out;
}

std::vector<cplx> integrate_backward(cplx lambda, const TimeGrid& times, std::span<const cplx> h) {
  require(static_cast<int>(h.size()) == times.size(), ErrorKind::GridMismatch, "forcing length != time grid");
  std::vector<cplx> out(h.size(), 0.0);
  for (int n = times.steps() - 1; n >= 0; --n) {
    const auto w = backward_weights(lambda, times[n + 1] - times[n]);
    out[n] = w.decay * out[n + 1] + w.left * h[n] + w.right * h[n + 1];
  }
  return out;
}

PropagatorTable::PropagatorTable(const FrequencyGrid& grid, const TimeGrid& times, const PhysParams& params)
    : grid_(grid), times_(times) {
  const int n = grid.n_modes();
  const int steps = times.steps();
  lambda_plus_.resize(n);
  lambda_minus_.resize(n);
  plus_.resize(static_cast<size_t>(n) * steps);
  minus_.resize(static_cast<size_t>(n) * steps);
  for (int k = grid.k_min(); k <= grid.k_max(); ++k) {
    const double xi = grid.frequency(k);
    lambda_plus_[grid.index(k)] = eigenvalue(xi, Branch::Plus, params);
    lambda_minus_[grid.index(k)] = eigenvalue(xi, Branch::Minus, params);
    for (int s = 0; s < steps; ++s) {
      const double dt = times[s + 1] - times[s];
      plus_[slot(k, s)] = backward_weights(lambda_plus_[grid.index(k)], dt);
      minus_[slot(k, s)] = forward_weights(lambda_minus_[grid.index(k)], dt);
    }
  }
}

cplx PropagatorTable::lambda(int k, Branch branch) const {
  return branch == Branch::Plus ? lambda_plus_[grid_.index(k)] : lambda_minus_[grid_.index(k)];
}

SpaceTimeField duhamel_minus(const SpaceTimeField& forcing, ForcingMode mode, const PhysParams& params) {
  const auto& grid = forcing.grid();
  const auto& times = forcing.times();
  SpaceTimeField out(grid, times);
  for (int k = grid.k_min() + 1; k <= grid.k_max(); ++k) {
    if (k == 0) continue;
    const double xi = grid.frequency(k);
    const cplx lam = eigenvalue(xi, Branch::Minus, params);
    require(lam.real() <= 1e-12 * std::abs(lam), ErrorKind::Stability,
            "I^- needs a non-growing kernel (mode " + std::to_string(k) + ")");
    auto h = mode_series(forcing, k);
    if (mode == ForcingMode::Dx)
      for (auto& v : h) v *= kI * xi;
    auto integral = integrate_forward(lam, times, h);
    for (int n = 0; n < times.size(); ++n) {
      if (mode == ForcingMode::Dt)
        integral[n] = h[n] - std::exp(times[n] * lam) * h[0] + lam * integral[n];
      out[n][k] = integral[n];
    }
  }
  return out;
}

DuhamelPlus duhamel_plus(const SpaceTimeField& forcing, ForcingMode mode, const PhysParams& params) {
  const auto& grid = forcing.grid();
  const auto& times = forcing.times();
  DuhamelPlus out{SpaceTimeField(grid, times), 0.0};
  const int last = times.size() - 1;
  for (int k = grid.k_min() + 1; k <= grid.k_max(); ++k) {
    if (k == 0) continue;
    const double xi = grid.frequency(k);
    const cplx lam = eigenvalue(xi, Branch::Plus, params);
    require(lam.real() >= -1e-12 * std::abs(lam), ErrorKind::Stability,
            "I^+ needs a kernel decaying backwards in time (mode " + std::to_string(k) + ")");
    auto h = mode_series(forcing, k);
    if (mode == ForcingMode::Dx)
      for (auto& v : h) v *= kI * xi;
    auto integral = integrate_backward(lam, times, h);
    const double q_last = std::abs(mode == ForcingMode::Dt ? lam * h[last] : h[last]);
    out.tail_estimate += q_last / (lam.real() + params.alpha * std::abs(xi));
    for (int n = 0; n < times.size(); ++n) {
      if (mode == ForcingMode::Dt) integral[n] = -h[n] + lam * integral[n];
      out.value[n][k] = integral[n];
    }
  }
  return out;
}

}  // namespace vsheet
