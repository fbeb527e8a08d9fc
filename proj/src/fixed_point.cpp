#include "vsheet/fixed_point.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/SVD>

#include "vsheet/error.hpp"
#include "vsheet/random.hpp"
#include "vsheet/spectral.hpp"
#include "vsheet/time_evolution.hpp"

namespace vsheet {
namespace {

constexpr cplx kI(0.0, 1.0);

SpaceTimeField zero_like(const FrequencyGrid& grid, const TimeGrid& times) { return SpaceTimeField(grid, times); }

double pair_balpha(const SpaceTimeField& a, const SpaceTimeField& b, double alpha) {
  const SpaceTimeField* comps[] = {&a, &b};
  return dominating_measure(comps, alpha).mass();
}

AssemblyResult assemble(const SolverConfig& config, const SpectralField& y0, const ForcingFields& f) {
  AssemblyOptions opt;
  opt.tail_tol = config.tail_tol;
  opt.exec = config.exec;
  if (config.mode == SolveMode::LocalAneg) {
    const SpectralField w0 = config.omega0.value_or(SpectralField(y0.grid()));
    return assemble_aneg(y0, w0, f.F, f.G1, f.G2, config.horizon, config.params, opt);
  }
  return assemble_apos(y0, f.F, f.G1, f.G2, config.params, opt);
}

// Three-point first derivative on a nonuniform grid at interior node n.
template <class Get>
cplx ddt(const TimeGrid& t, int n, Get&& f) {
  const double h1 = t[n] - t[n - 1], h2 = t[n + 1] - t[n];
  return -h2 / (h1 * (h1 + h2)) * f(n - 1) + (h2 - h1) / (h1 * h2) * f(n) + h1 / (h2 * (h1 + h2)) * f(n + 1);
}

}  // namespace

const char* to_string(SolveMode mode) {
  switch (mode) {
    case SolveMode::GlobalApos: return "global_apos";
    case SolveMode::LocalAneg: return "local_aneg";
    case SolveMode::KhAzero: return "kh_azero";
  }
  return "?";
}

std::optional<SolveMode> parse_solve_mode(const std::string& name) {
  if (name == "global_apos") return SolveMode::GlobalApos;
  if (name == "local_aneg") return SolveMode::LocalAneg;
  if (name == "kh_azero") return SolveMode::KhAzero;
  return std::nullopt;
}

SpectralField make_profile(const FrequencyGrid& grid, const InitialProfile& profile) {
  SpectralField f(grid);
  const double eps = profile.amplitude;
  auto in_range = [&](int k) {
    require(k >= 1 && k <= grid.k_max(), ErrorKind::Configuration, "profile mode out of range: " + std::to_string(k));
  };
  if (profile.name == "single_mode") {
    in_range(profile.k);
    return SpectralField::cosine(grid, profile.k, eps);
  }
  if (profile.name == "two_mode") {
    in_range(profile.k);
    in_range(profile.k2);
    require(profile.k != profile.k2, ErrorKind::Configuration, "two_mode needs distinct modes");
    return SpectralField::cosine(grid, profile.k, eps / 2) + SpectralField::sine(grid, profile.k2, eps / 2);
  }
  if (profile.name == "band_limited_random") {
    in_range(profile.band);
    std::mt19937_64 rng(profile.seed);
    return random_band_field(grid, profile.band, eps, rng);
  }
  if (profile.name == "explicit") {
    require(profile.coefficients.has_value(), ErrorKind::Configuration, "explicit profile without coefficients");
    require(profile.coefficients->grid() == grid, ErrorKind::GridMismatch, "explicit profile on another grid");
    return *profile.coefficients;
  }
  throw Error(ErrorKind::Configuration, "unknown profile '" + profile.name + "'");
}

FrequencyGrid SolverConfig::grid() const { return make_grid(n_modes, period_scale); }

TimeGrid SolverConfig::time_grid() const { return TimeGrid::graded(t_max, steps, grading_rate); }

std::vector<std::string> SolverConfig::violations() const {
  std::vector<std::string> out = params.violations();
  const double a = params.atwood;
  if (mode == SolveMode::GlobalApos && !(a > 0.0)) out.push_back("mode global_apos needs atwood > 0");
  if (mode == SolveMode::KhAzero && a != 0.0) out.push_back("mode kh_azero needs atwood = 0");
  if (mode == SolveMode::LocalAneg) {
    if (!(a < 0.0)) out.push_back("mode local_aneg needs atwood < 0");
    if (!(horizon > 0.0)) out.push_back("horizon must be positive");
    if (t_max < 2.0 * horizon) out.push_back("t_max must be >= 2 * horizon for local_aneg");
  }
  if (n_modes < 8 || n_modes % 2 != 0) out.push_back("n_modes must be even and >= 8");
  if (!(period_scale > 0.0)) out.push_back("period_scale must be positive");
  if (!(t_max > 0.0)) out.push_back("t_max must be positive");
  if (steps < 2) out.push_back("steps must be >= 2");
  if (grading_rate < 0.0) out.push_back("grading_rate must be >= 0");
  if (!(profile.amplitude >= 0.0) || profile.amplitude > 0.5)
    out.push_back("initial amplitude must be in [0, 0.5]");
  if (!(picard_tol > 0.0) || !(series_tol > 0.0) || !(tail_tol > 0.0)) out.push_back("tolerances must be positive");
  if (max_iterations < 1) out.push_back("max_iterations must be >= 1");
  if (j_max < 1 || j_max > 10) out.push_back("j_max must be in [1, 10]");
  return out;
}

void SolverConfig::validate() const {
  const auto v = violations();
  if (v.empty()) return;
  std::string msg;
  for (const auto& s : v) msg += (msg.empty() ? "" : "; ") + s;
  throw Error(ErrorKind::Configuration, msg);
}

std::pair<SpaceTimeField, SpaceTimeField> linear_solution(const SpectralField& y0x, const PhysParams& params,
                                                          const TimeGrid& times) {
  require(params.atwood >= 0.0, ErrorKind::InvalidArgument, "linear solution formula needs a >= 0");
  require(std::abs(y0x[0]) <= 1e-12 * std::max(1.0, b0_norm(y0x)), ErrorKind::InvalidArgument,
          "initial y_x must have zero mean");
  const auto& grid = y0x.grid();
  const SpectralField w0 =
      -1.0 * (params.atwood * apply_multiplier(y0x, Symbol::Hilbert) + apply_multiplier(y0x, Symbol::M, &params));
  SpaceTimeField y(grid, times), w(grid, times);
  for (int n = 0; n < times.size(); ++n) {
    y[n] = semigroup_apply(y0x, Branch::Minus, times[n], params);
    w[n] = semigroup_apply(w0, Branch::Minus, times[n], params);
  }
  return {y, w};
}

ForcingFields evaluate_forcing(const SpaceTimeField& y_x, const SpaceTimeField& omega, const PhysParams& params,
                               NonlinearBackend backend, const SeriesOptions& options, Exec exec) {
  const auto& grid = y_x.grid();
  const auto& times = y_x.times();
  ForcingFields out{zero_like(grid, times), zero_like(grid, times), zero_like(grid, times)};
  SeriesOptions inner = options;
  inner.op.exec = Exec::Serial;
  std::vector<std::string> errors(times.size());
  parallel_for(times.size(), exec, [&](int n) {
    try {
      auto e = eval_nonlinear(y_x[n], omega[n], params, backend, inner);
      out.F[n] = std::move(e.F);
      out.G1[n] = std::move(e.G1);
      out.G2[n] = std::move(e.G2);
    } catch (const std::exception& ex) {
      errors[n] = ex.what();
    }
  });
  for (int n = 0; n < times.size(); ++n)
    if (!errors[n].empty()) throw Error(ErrorKind::SeriesDivergence, "nonlinear evaluation failed: " + errors[n]);
  return out;
}

SolutionBundle picard_solve(const SolverConfig& config) {
  config.validate();
  const FrequencyGrid grid = config.grid();
  const TimeGrid times = config.time_grid();
  const SpectralField y0 = make_profile(grid, config.profile);
  const double alpha = config.params.alpha;
  SeriesOptions series;
  series.tol = config.series_tol;
  series.op.j_max = config.j_max;

  ForcingFields zero{zero_like(grid, times), zero_like(grid, times), zero_like(grid, times)};
  AssemblyResult current = assemble(config, y0, zero);

  SolutionBundle b(current.y_x, current.omega, current.omega0_prescribed);
  double prev_diff = 0.0;
  int growing = 0;
  for (int n = 1; n <= config.max_iterations; ++n) {
    const auto start = std::chrono::steady_clock::now();
    const ForcingFields f =
        evaluate_forcing(current.y_x, current.omega, config.params, config.backend, series, config.exec);
    AssemblyResult next = assemble(config, y0, f);
    const double diff = pair_balpha(next.y_x - current.y_x, next.omega - current.omega, alpha);
    const double ratio = (n == 1 || prev_diff == 0.0) ? 0.0 : diff / prev_diff;
    IterationRecord rec;
    rec.n = n;
    rec.contraction_ratio = ratio;
    rec.difference = diff;
    rec.balpha_norm = pair_balpha(next.y_x, next.omega, alpha);
    rec.tail_estimate = next.tail_estimate;
    rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    b.history.push_back(rec);
    if (n > 1) b.contraction_ratios.push_back(ratio);
    current = std::move(next);
    b.iterations = n;
    if (!std::isfinite(diff)) throw Error(ErrorKind::Divergence, "Picard iterate is not finite");
    growing = (n > 1 && ratio >= 1.0) ? growing + 1 : 0;
    if (growing >= 3) {
      std::ostringstream os;
      os << "Picard iteration does not contract; ratios:";
      for (double r : b.contraction_ratios) os << ' ' << r;
      throw DivergenceError(os.str(), b.history);
    }
    prev_diff = diff;
    if (diff < config.picard_tol) {
      b.converged = true;
      break;
    }
  }
  b.y_x = std::move(current.y_x);
  b.omega = std::move(current.omega);
  b.omega0 = std::move(current.omega0_prescribed);
  b.tail_estimate = current.tail_estimate;
  b.valid_until = current.valid_until;
  b.balpha_norms = {balpha_norm(b.y_x, alpha), balpha_norm(b.omega, alpha)};
  for (int n = 0; n < times.size(); ++n) {
    b.sup_y.push_back(sup_norm(b.y_x[n]));
    b.sup_omega.push_back(sup_norm(b.omega[n]));
  }
  if (b.converged) b.residual_norm = residual_check(b, config);
  return b;
}

double extra_sweep_change(const SolutionBundle& bundle, const SolverConfig& config) {
  const FrequencyGrid grid = config.grid();
  const SpectralField y0 = make_profile(grid, config.profile);
  SeriesOptions series;
  series.tol = config.series_tol;
  series.op.j_max = config.j_max;
  const ForcingFields f =
      evaluate_forcing(bundle.y_x, bundle.omega, config.params, config.backend, series, config.exec);
  const AssemblyResult next = assemble(config, y0, f);
  return pair_balpha(next.y_x - bundle.y_x, next.omega - bundle.omega, config.params.alpha);
}

double linear_system_residual(const SpaceTimeField& y_x, const SpaceTimeField& omega, const PhysParams& params,
                              bool with_nonlinearity, ResidualMode mode, double t_end, Exec exec) {
  const auto& grid = y_x.grid();
  const auto& times = y_x.times();
  const int nt = times.size();
  const double a = params.atwood;
  ForcingFields f{zero_like(grid, times), zero_like(grid, times), zero_like(grid, times)};
  if (with_nonlinearity) f = evaluate_forcing(y_x, omega, params, NonlinearBackend::ClosedForm, {}, exec);

  // exact decaying linear part, removed before differencing
  SpaceTimeField wy = y_x, ww = omega;
  if (mode == ResidualMode::Subtracted) {
    const double xc = a < 0.0 ? split_frequency(params) : -1.0;
    for (int k = grid.k_min() + 1; k <= grid.k_max(); ++k) {
      if (k == 0) continue;
      const double xi = grid.frequency(k);
      if (std::abs(xi) <= xc) {
        const Eigen::Vector2cd v0(y_x[0][k], omega[0][k]);
        for (int n = 0; n < nt; ++n) {
          const Eigen::Vector2cd vh = matrix_exp_A(xi, times[n], params) * v0;
          wy[n][k] -= vh(0);
          ww[n][k] -= vh(1);
        }
        continue;
      }
      const cplx m = symbol_m(xi, params);
      const double s = xi > 0 ? 1.0 : -1.0;
      const cplx um0 = (-m - kI * a * s) * y_x[0][k] + omega[0][k];
      const cplx lm = eigenvalue(xi, Branch::Minus, params);
      for (int n = 0; n < nt; ++n) {
        const cplx um = std::exp(times[n] * lm) * um0;
        wy[n][k] -= -um / (2.0 * m);
        ww[n][k] -= -(-m + kI * a * s) * um / (2.0 * m);
      }
    }
  }

  std::vector<double> per_node(nt, 0.0);
  parallel_for(nt, exec, [&](int n) {
    if (n == 0 || n == nt - 1 || times[n] > t_end * (1.0 + 1e-12)) return;
    double r1 = 0.0, r2 = 0.0;
    for (int k = grid.k_min() + 1; k <= grid.k_max(); ++k) {
      const double xi = grid.frequency(k);
      const double ax = std::abs(xi);
      const double s = xi > 0 ? 1.0 : (xi < 0 ? -1.0 : 0.0);
      const cplx yt = ddt(times, n, [&](int i) { return wy[i][k]; });
      const cplx wt = ddt(times, n, [&](int i) { return ww[i][k]; });
      const cplx g1t = ddt(times, n, [&](int i) { return f.G1[i][k]; });
      const cplx y = wy[n][k], w = ww[n][k];
      r1 += std::abs(yt - ax * w - kI * xi * f.F[n][k]);
      r2 += std::abs(wt - kI * a * s * yt - ax * y - kI * a * xi * w + a * params.gravity * y -
                     (g1t + kI * xi * f.G2[n][k]));
    }
    per_node[n] = std::max(r1, r2);
  });
  double worst = 0.0;
  for (double r : per_node) worst = std::max(worst, r);
  return worst;
}

double residual_check(const SolutionBundle& bundle, const SolverConfig& config, ResidualMode mode) {
  return linear_system_residual(bundle.y_x, bundle.omega, config.params, true, mode, bundle.valid_until,
                                config.exec);
}

EnvelopeReport balpha_envelope_check(const SolutionBundle& bundle, const SolverConfig& config) {
  const double alpha = config.params.alpha;
  const SpaceTimeField* comps[] = {&bundle.y_x, &bundle.omega};
  const DominatingMeasure mu = dominating_measure(comps, alpha);
  EnvelopeReport r;
  r.mass = mu.mass();
  r.dominated = true;
  const auto& grid = bundle.y_x.grid();
  for (int n = 0; n < bundle.y_x.size(); ++n)
    for (int k = grid.k_min(); k <= grid.k_max(); ++k) {
      const double w = std::exp(alpha * bundle.y_x.times()[n] * std::abs(grid.frequency(k)));
      if (w * std::abs(bundle.y_x[n][k]) > mu.weight(k) * (1 + 1e-14) ||
          w * std::abs(bundle.omega[n][k]) > mu.weight(k) * (1 + 1e-14))
        r.dominated = false;
    }
  const SpectralField y0 = make_profile(grid, config.profile);
  ForcingFields zero{zero_like(grid, bundle.y_x.times()), zero_like(grid, bundle.y_x.times()),
                     zero_like(grid, bundle.y_x.times())};
  SolverConfig lin = config;
  lin.tail_tol = std::numeric_limits<double>::infinity();
  const AssemblyResult l = assemble(lin, y0, zero);
  r.linear_mass = pair_balpha(l.y_x, l.omega, alpha);
  r.holds = r.dominated && std::isfinite(r.mass) && r.mass <= config.envelope_factor * r.linear_mass;
  return r;
}

}  // namespace vsheet

namespace vsheet {

GrowthEnvelope low_mode_growth(const SolutionBundle& bundle, const PhysParams& params, double T) {
  require(params.atwood < 0.0, ErrorKind::InvalidArgument, "low-mode growth needs a < 0");
  const auto& grid = bundle.y_x.grid();
  const auto& times = bundle.y_x.times();
  const double xc = split_frequency(params);
  GrowthEnvelope g;
  std::vector<int> low;
  for (int k = 1; k <= grid.k_max(); ++k)
    if (grid.frequency(k) <= xc) low.push_back(k);
  g.low_modes = static_cast<int>(low.size());
  for (int n = 1; n < times.size() && times[n] <= T * (1 + 1e-12); ++n)
    for (int k : low) {
      const Eigen::JacobiSVD<Eigen::Matrix2cd> svd(matrix_exp_A(grid.frequency(k), times[n], params));
      g.rate = std::max(g.rate, std::log(svd.singularValues()(0)) / times[n]);
    }
  auto mass = [&](int n) {
    double m = 0.0;
    for (int k : low) m += std::hypot(std::abs(bundle.y_x[n][k]), std::abs(bundle.omega[n][k]));
    return m;
  };
  const double m0 = mass(0);
  for (int n = 0; n < times.size() && times[n] <= T * (1 + 1e-12); ++n)
    if (m0 > 0.0) g.worst_ratio = std::max(g.worst_ratio, mass(n) / (std::exp(g.rate * times[n]) * m0));
  return g;
}

}  // namespace vsheet
