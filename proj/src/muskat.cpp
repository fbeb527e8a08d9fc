#include "vsheet/muskat.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include "vsheet/error.hpp"
#include "vsheet/kernels.hpp"
#include "vsheet/singular_ops.hpp"
#include "vsheet/spectral.hpp"
#include "vsheet/time_evolution.hpp"

namespace vsheet {
namespace {

constexpr cplx kI(0.0, 1.0);

double decay_rate(double gap, double xi) { return -0.5 * gap * std::abs(xi); }

void require_mean_zero(const SpectralField& f_x) {
  require(std::abs(f_x[0]) <= 1e-12 * std::max(1.0, b0_norm(f_x)), ErrorKind::InvalidArgument,
          "f_x must have zero mean");
}

template <class Get>
cplx ddt(const TimeGrid& t, int n, Get&& f) {
  const double h1 = t[n] - t[n - 1], h2 = t[n + 1] - t[n];
  return -h2 / (h1 * (h1 + h2)) * f(n - 1) + (h2 - h1) / (h1 * h2) * f(n) + h1 / (h2 * (h1 + h2)) * f(n + 1);
}

SpaceTimeField forcing(const SpaceTimeField& f_x, double gap, NonlinearBackend backend, Exec exec) {
  SpaceTimeField out(f_x.grid(), f_x.times());
  std::vector<std::string> errors(f_x.size());
  parallel_for(f_x.size(), exec, [&](int n) {
    try {
      out[n] = derivative(muskat_nonlinearity(f_x[n], gap, backend, Exec::Serial));
    } catch (const std::exception& e) {
      errors[n] = e.what();
    }
  });
  for (const auto& e : errors)
    if (!e.empty()) throw Error(ErrorKind::SeriesDivergence, "Muskat nonlinearity failed: " + e);
  return out;
}

// f_x(t) = S(t) f0x + int_0^t S(t - s) q(s) ds, mode by mode.
SpaceTimeField duhamel(const SpectralField& f0x, const SpaceTimeField& q, double gap, Exec exec) {
  const auto& grid = q.grid();
  const auto& times = q.times();
  SpaceTimeField out(grid, times);
  parallel_for(grid.n_modes(), exec, [&](int idx) {
    const int k = grid.mode(idx);
    if (grid.excluded(k) || k == 0) return;
    const double lam = decay_rate(gap, grid.frequency(k));
    std::vector<cplx> h(times.size());
    for (int n = 0; n < times.size(); ++n) h[n] = q[n][k];
    const auto w = integrate_forward(lam, times, h);
    for (int n = 0; n < times.size(); ++n) out[n][k] = std::exp(lam * times[n]) * f0x[k] + w[n];
  });
  return out;
}

}  // namespace

FrequencyGrid MuskatConfig::grid() const { return make_grid(n_modes, period_scale); }

TimeGrid MuskatConfig::time_grid() const { return TimeGrid::graded(t_max, steps, grading_rate); }

std::vector<std::string> MuskatConfig::violations() const {
  std::vector<std::string> out;
  if (!(density_gap > 0.0)) out.push_back("density_gap must be > 0 (stable regime)");
  if (!(alpha > 0.0)) out.push_back("alpha must be positive");
  if (density_gap > 0.0 && !(alpha < density_gap / 2))
    out.push_back("alpha must be < density_gap / 2 (linear estimate constraint)");
  if (n_modes < 8 || n_modes % 2 != 0) out.push_back("n_modes must be even and >= 8");
  if (!(period_scale > 0.0)) out.push_back("period_scale must be positive");
  if (!(t_max > 0.0)) out.push_back("t_max must be positive");
  if (steps < 2) out.push_back("steps must be >= 2");
  if (grading_rate < 0.0) out.push_back("grading_rate must be >= 0");
  if (!(profile.amplitude >= 0.0) || profile.amplitude > 0.5)
    out.push_back("initial amplitude must be in [0, 0.5]");
  if (!(picard_tol > 0.0) || !(series_tol > 0.0)) out.push_back("tolerances must be positive");
  if (max_iterations < 1) out.push_back("max_iterations must be >= 1");
  return out;
}

void MuskatConfig::validate() const {
  const auto v = violations();
  if (v.empty()) return;
  std::string msg;
  for (const auto& s : v) msg += (msg.empty() ? "" : "; ") + s;
  throw Error(ErrorKind::Configuration, msg);
}

SpectralField muskat_nonlinearity(const SpectralField& f_x, double density_gap, NonlinearBackend backend,
                                  Exec exec) {
  require_mean_zero(f_x);
  const auto& grid = f_x.grid();
  if (backend == NonlinearBackend::Series) {
    require(b0_norm(f_x) < 1.0, ErrorKind::SeriesDivergence, "series needs |f_x|_B0 < 1");
    OperatorConfig op;
    op.exec = exec;
    SpectralField acc(grid);
    for (int n = 1; 2 * n <= op.j_max; ++n) {
      const SpectralField t = tilde_tj_apply(f_x, f_x, 2 * n, Backend::Quadrature, op);
      acc += (n % 2 == 0 ? 1.0 : -1.0) * t;
    }
    return (0.5 * density_gap) * acc;
  }
  const int n = grid.n_modes();
  const double L = grid.period_scale(), h = grid.spacing();
  const auto f = synthesize(antiderivative(f_x));
  const auto fx = synthesize(f_x);
  const auto fxx = synthesize(derivative(f_x));
  const PeriodizedKernel k1(0, L);
  std::vector<double> kreal(n, 0.0);
  for (int d = 1; d < n; ++d) kreal[d] = k1(d * h);
  std::vector<double> out(n);
  parallel_for(n, exec, [&](int i) {
    const double p2 = fx[i] * fx[i];
    double sum = -fxx[i] * p2 / (1.0 + p2);  // diagonal limit
    for (int l = 0; l < n; ++l) {
      if (l == i) continue;
      const int d = (i - l + n) % n;
      const double df = f[i] - f[l];
      const double kc = complex_cot_kernel(cplx(d * h, df), L).real();
      sum += (fx[i] - fx[l]) * (kc - kreal[d]);
    }
    out[i] = density_gap / (2.0 * std::numbers::pi) * h * sum;
  });
  return analyze(grid, out);
}

double muskat_series_truncation(double m, double density_gap) {
  require(m < 1.0, ErrorKind::SeriesDivergence, "series needs |f_x|_B0 < 1");
  double tail = 0.0;
  for (int j = 12; j < 400; j += 2) tail += (1.0 + 2.0 * j) * std::pow(m, j + 1);
  return 0.5 * density_gap * tail;
}

SpaceTimeField muskat_linear(const SpectralField& f0x, double density_gap, const TimeGrid& times) {
  require_mean_zero(f0x);
  const auto& grid = f0x.grid();
  SpaceTimeField out(grid, times);
  for (int n = 0; n < times.size(); ++n)
    for (int k = grid.k_min() + 1; k <= grid.k_max(); ++k)
      if (k != 0) out[n][k] = std::exp(decay_rate(density_gap, grid.frequency(k)) * times[n]) * f0x[k];
  return out;
}

MuskatSolution muskat_picard_solve(const MuskatConfig& config) {
  config.validate();
  const FrequencyGrid grid = config.grid();
  const TimeGrid times = config.time_grid();
  const SpectralField f0x = make_profile(grid, config.profile);
  const double gap = config.density_gap;

  MuskatSolution sol(muskat_linear(f0x, gap, times));
  if (!config.nonlinear) {
    sol.converged = true;
  } else {
    double prev = 0.0;
    int growing = 0;
    for (int it = 1; it <= config.max_iterations; ++it) {
      const auto start = std::chrono::steady_clock::now();
      SpaceTimeField next = duhamel(f0x, forcing(sol.f_x, gap, config.backend, config.exec), gap, config.exec);
      const double diff = balpha_norm(next - sol.f_x, config.alpha);
      const double ratio = (it == 1 || prev == 0.0) ? 0.0 : diff / prev;
      IterationRecord rec;
      rec.n = it;
      rec.contraction_ratio = ratio;
      rec.difference = diff;
      rec.balpha_norm = balpha_norm(next, config.alpha);
      rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      sol.history.push_back(rec);
      if (it > 1) sol.contraction_ratios.push_back(ratio);
      sol.f_x = std::move(next);
      sol.iterations = it;
      if (!std::isfinite(diff)) throw Error(ErrorKind::Divergence, "Picard iterate is not finite");
      growing = (it > 1 && ratio >= 1.0) ? growing + 1 : 0;
      if (growing >= 3) {
        std::ostringstream os;
        os << "Picard iteration does not contract; ratios:";
        for (double r : sol.contraction_ratios) os << ' ' << r;
        throw DivergenceError(os.str(), sol.history);
      }
      prev = diff;
      if (diff < config.picard_tol) {
        sol.converged = true;
        break;
      }
    }
  }
  sol.balpha_norm = balpha_norm(sol.f_x, config.alpha);
  for (int n = 0; n < times.size(); ++n) {
    sol.b0_profile.push_back(b0_norm(sol.f_x[n]));
    sol.sup_profile.push_back(sup_norm(sol.f_x[n]));
  }
  if (sol.converged && config.nonlinear) sol.residual_norm = muskat_residual(sol.f_x, gap, config.exec);
  return sol;
}

double muskat_residual(const SpaceTimeField& f_x, double density_gap, Exec exec) {
  const auto& grid = f_x.grid();
  const auto& times = f_x.times();
  const int nt = times.size();
  const SpaceTimeField q = forcing(f_x, density_gap, NonlinearBackend::ClosedForm, exec);
  const SpaceTimeField w = f_x - muskat_linear(f_x[0], density_gap, times);
  std::vector<double> per_node(nt, 0.0);
  parallel_for(nt, exec, [&](int n) {
    if (n == 0 || n == nt - 1) return;
    double r = 0.0;
    for (int k = grid.k_min() + 1; k <= grid.k_max(); ++k) {
      const double lam = decay_rate(density_gap, grid.frequency(k));
      r += std::abs(ddt(times, n, [&](int i) { return w[i][k]; }) - lam * w[n][k] - q[n][k]);
    }
    per_node[n] = r;
  });
  double worst = 0.0;
  for (double r : per_node) worst = std::max(worst, r);
  return worst;
}

EnvelopeReport muskat_envelope_check(const MuskatSolution& sol, const MuskatConfig& config) {
  EnvelopeReport r;
  const DominatingMeasure mu = dominating_measure(sol.f_x, config.alpha);
  r.mass = mu.mass();
  r.dominated = true;
  const auto& grid = sol.f_x.grid();
  for (int n = 0; n < sol.f_x.size(); ++n)
    for (int k = grid.k_min(); k <= grid.k_max(); ++k)
      if (std::exp(config.alpha * sol.f_x.times()[n] * std::abs(grid.frequency(k))) * std::abs(sol.f_x[n][k]) >
          mu.weight(k) * (1 + 1e-14))
        r.dominated = false;
  r.linear_mass = balpha_norm(muskat_linear(sol.f_x[0], config.density_gap, sol.f_x.times()), config.alpha);
  r.holds = r.dominated && std::isfinite(r.mass) && r.mass <= config.envelope_factor * r.linear_mass;
  return r;
}

SpaceTimeField oracle_rk4_muskat(const SpectralField& f0x, double density_gap, const TimeGrid& output,
                                 double max_dt) {
  require_mean_zero(f0x);
  require(max_dt > 0.0, ErrorKind::InvalidArgument, "max_dt must be positive");
  require(output[0] == 0.0, ErrorKind::InvalidArgument, "output grid must start at 0");
  const auto& grid = f0x.grid();
  const int n = grid.n_modes();
  require(n % 4 == 0, ErrorKind::InvalidArgument, "alternating-point rule needs N divisible by 4");
  const double L = grid.period_scale(), h = grid.spacing();
  const double c = density_gap / (2.0 * std::numbers::pi) * 2.0 * h;

  // d_t f = (gap/2pi) int (f_x - f_x') Re K1(x - x' + i(f - f')) dx'
  auto rhs = [&](const SpectralField& f) {
    const auto fv = synthesize(f);
    const auto fx = synthesize(derivative(f));
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int d = 1; d < n; d += 2) {
        const int l = (i - d + n) % n;
        acc += (fx[i] - fx[l]) * complex_cot_kernel(cplx(d * h, fv[i] - fv[l]), L).real();
      }
      out[i] = c * acc;
    }
    return analyze(grid, out);
  };

  // the exact flow does not grow |f_x|_B0 at small data; a 100x increase is the scheme
  const double limit = 100.0 * std::max(b0_norm(f0x), 1e-8);
  SpectralField f = antiderivative(f0x);
  SpaceTimeField result(grid, output);
  result[0] = f0x;
  for (int m = 1; m < output.size(); ++m) {
    const double span = output[m] - output[m - 1];
    const int sub = std::max(1, static_cast<int>(std::ceil(span / max_dt - 1e-12)));
    const double dt = span / sub;
    for (int s = 0; s < sub; ++s) {
      const SpectralField k1 = rhs(f);
      const SpectralField k2 = rhs(f + (dt / 2) * k1);
      const SpectralField k3 = rhs(f + (dt / 2) * k2);
      const SpectralField k4 = rhs(f + dt * k3);
      f += (dt / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      const double size = b0_norm(derivative(f));
      if (!std::isfinite(size) || size > limit)
        throw Error(ErrorKind::Stability, "RK4 Muskat oracle blew up; reduce max_dt");
    }
    result[m] = derivative(f);
  }
  return result;
}

}  // namespace vsheet
