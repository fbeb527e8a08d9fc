// One line per acceptance criterion; exit status is the number of failures.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "vsheet/cli_io.hpp"
#include "vsheet/csv.hpp"
#include "vsheet/fixed_point.hpp"
#include "vsheet/muskat.hpp"
#include "vsheet/random.hpp"
#include "vsheet/singular_ops.hpp"
#include "vsheet/spectral.hpp"
#include "vsheet/time_evolution.hpp"

using namespace vsheet;

namespace {

int failures = 0;

void verdict(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("[%s] %2d %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

template <class Fn>
void criterion(int id, const char* name, Fn&& fn) {
  try {
    fn(id, name);
  } catch (const std::exception& e) {
    verdict(id, name, false, std::string("exception: ") + e.what());
  }
}

PhysParams params(double a, double g, double alpha) {
  PhysParams p;
  p.atwood = a;
  p.gravity = g;
  p.alpha = alpha;
  return p;
}

double max_gap(const SpaceTimeField& a, const SpaceTimeField& b, int count) {
  double e = 0.0;
  for (int n = 0; n < count; ++n) e = std::max(e, b0_norm(a[n] - b[n]));
  return e;
}

TimeGrid leading(const TimeGrid& t, double upto) {
  std::vector<double> nodes;
  for (double s : t.nodes())
    if (s <= upto * (1 + 1e-12)) nodes.push_back(s);
  return TimeGrid(nodes);
}

SolverConfig global_config(double a) {
  SolverConfig c;
  c.params = params(a, -1.0, 0.05);
  c.n_modes = 64;
  c.period_scale = 4.0;
  c.t_max = 20.0;
  c.steps = 400;
  c.grading_rate = 0.6;
  c.profile.name = "band_limited_random";
  c.profile.band = 6;
  c.profile.amplitude = 0.01;
  c.profile.seed = 1;
  c.mode = a > 0 ? SolveMode::GlobalApos : SolveMode::KhAzero;
  return c;
}

SolverConfig local_config() {
  SolverConfig c;
  c.params = params(-0.5, -1.0, 0.1);
  c.n_modes = 64;
  c.period_scale = 4.0;
  c.t_max = 1.0;
  c.steps = 100;
  c.profile.name = "band_limited_random";
  c.profile.band = 6;
  c.profile.amplitude = 1e-3;
  c.mode = SolveMode::LocalAneg;
  c.horizon = 0.5;
  return c;
}

MuskatConfig muskat_config() {
  MuskatConfig c;
  c.density_gap = 2.0;
  c.alpha = 0.1;
  c.n_modes = 128;
  c.t_max = 2.0;
  c.steps = 200;
  c.profile.name = "band_limited_random";
  c.profile.band = 4;
  c.profile.amplitude = 0.01;
  return c;
}

void multipliers(int id, const char* name) {
  double worst = 0.0;
  for (double L : {1.0, 2.5}) {
    const auto g = make_grid(64, L);
    for (int k = 1; k <= g.k_max(); ++k) {
      const double xi = g.frequency(k);
      const auto c = SpectralField::cosine(g, k), s = SpectralField::sine(g, k);
      worst = std::max(worst, b0_norm(apply_multiplier(c, Symbol::Hilbert) - s));
      worst = std::max(worst, b0_norm(apply_multiplier(s, Symbol::Hilbert) + c));
      worst = std::max(worst, b0_norm(apply_multiplier(c, Symbol::Lambda) - xi * c));
      worst = std::max(worst, b0_norm(apply_multiplier(c, Symbol::Dx) + xi * s));
      worst = std::max(worst, b0_norm(derivative(s) - xi * c));
    }
  }
  // m vanishes at |xi| = ag/(1-a^2) = 2/3, on-grid as k = 2 for L = 3
  const auto g3 = make_grid(32, 3.0);
  const double m0 = std::abs(symbol_m(g3.frequency(2), params(-0.5, -1.0, 0.1)));
  verdict(id, name, worst <= 1e-12 && m0 <= 1e-14,
          fmt("max multiplier error %.2e (tol 1e-12), |m| at the degenerate frequency %.2e (tol 1e-14)", worst, m0));
}

void backends(int id, const char* name) {
  const auto g = make_grid(256, 1.0);
  std::mt19937_64 rng(2);
  double worst = 0.0, worst_tilde = 0.0;
  for (int trial = 0; trial < 8; ++trial) {
    const auto yx = random_band_field(g, 12, 0.1, rng);
    const auto u = random_band_field(g, 12, 1.0, rng, true);
    for (int j = 0; j <= 6; ++j) {
      worst = std::max(worst, b0_norm(tj_apply(yx, u, j, Backend::Quadrature) - tj_apply(yx, u, j, Backend::Spectral)));
      if (j >= 1)
        worst_tilde = std::max(worst_tilde, b0_norm(tilde_tj_apply(yx, u, j, Backend::Quadrature) -
                                                    tilde_tj_apply(yx, u, j, Backend::Spectral)));
    }
  }
  verdict(id, name, worst <= 1e-7 && worst_tilde <= 1e-7,
          fmt("N = 256, j <= 6, |y_x| = 0.1: T_j gap %.2e, Ttilde_j gap %.2e (tol 1e-7)", worst, worst_tilde));
}

void inequalities(int id, const char* name) {
  RunConfig cfg;
  cfg.vortex.params = params(0.5, -1.0, 0.1);
  cfg.operators.cases = 100;
  cfg.operators.seed = 3;
  cfg.operators.rho = {0.0, 0.1};
  cfg.operators.n_modes = 64;
  cfg.operators.amplitude = 0.3;
  const auto rep = validate_operators(cfg);
  int cases = 0, violations = 0;
  double worst = 0.0;
  bool errors = false;
  for (const auto& p : rep.body["properties"]) {
    const std::string n = p["name"];
    if (n.rfind("backend", 0) == 0) continue;
    cases += p["cases"].get<int>();
    violations += p["violations"].get<int>();
    worst = std::max(worst, p["worst_ratio"].get<double>());
    errors = errors || p.contains("errors");
  }
  verdict(id, name, violations == 0 && !errors && cases == 800,
          fmt("%.0f cases over T_j norm, T_j difference, R_k and F/G majorant at rho in {0, 0.1}: %.0f violations, "
              "worst lhs/rhs %.3f (slack 1e-6)",
              cases, violations, worst));
}

void linear_fidelity(int id, const char* name) {
  const auto g = make_grid(32, 1.0);
  const auto y0 = SpectralField::cosine(g, 1, 0.01) + SpectralField::sine(g, 3, 0.005);
  auto order_apos = [&](double a) {
    const auto p = params(a, -1.0, 0.1);
    auto res = [&](int steps) {
      const TimeGrid t = TimeGrid::uniform(16.0, steps);
      SpaceTimeField z(g, t);
      const auto r = assemble_apos(y0, z, z, z, p);
      return linear_system_residual(r.y_x, r.omega, p, false, ResidualMode::Raw, 16.0);
    };
    return std::log2(res(400) / res(800));
  };
  auto order_aneg = [&] {
    const auto p = params(-0.5, -1.0, 0.1);
    const auto g4 = make_grid(32, 4.0);
    const auto y = SpectralField::cosine(g4, 1, 0.01) + SpectralField::sine(g4, 9, 0.005);
    const auto w = SpectralField::cosine(g4, 2, 0.003);
    auto res = [&](int steps) {
      const TimeGrid t = TimeGrid::uniform(1.0, steps);
      SpaceTimeField z(g4, t);
      const auto r = assemble_aneg(y, w, z, z, z, 0.5, p);
      return linear_system_residual(r.y_x, r.omega, p, false, ResidualMode::Raw, 0.5);
    };
    return std::log2(res(50) / res(100));
  };
  const double o1 = order_apos(0.3), o2 = order_apos(0.0), o3 = order_aneg();

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ua(-0.95, 0.95), ug(-3.0, -0.1), ux(-8.0, 8.0), ut(0.0, 2.0);
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const auto p = params(ua(rng), ug(rng), 0.1);
    double x = ux(rng);
    if (i % 5 == 0 && p.atwood < 0) x = p.atwood * p.gravity / (1 - p.atwood * p.atwood);  // Jordan frequency
    if (x == 0.0) x = 1.0;
    const double t = ut(rng);
    const Matrix2c ref = matrix_exp_reference(x, t, p);
    worst = std::max(worst, (matrix_exp_A(x, t, p) - ref).cwiseAbs().maxCoeff() / std::max(1.0, ref.cwiseAbs().maxCoeff()));
  }
  const double order = std::min({o1, o2, o3});
  verdict(id, name, order >= 1.9 && worst <= 1e-12,
          fmt("residual order a=0.3 %.3f, a=0 %.3f, a=-0.5 %.3f (min 1.9); matrix_exp max rel error %.2e over 500 "
              "samples (tol 1e-12)",
              o1, o2, o3, worst));
}

void lemma_bounds(int id, const char* name) {
  const auto g = make_grid(32, 1.0);
  std::string detail;
  bool ok = true;
  for (double a : {0.25, 0.5, 0.75}) {
    const auto p = params(a, -1.0, 0.4 * std::sqrt(1 - a * a) / 2);
    const double alpha = p.alpha;
    double c[2][4] = {};
    for (int level = 0; level < 2; ++level) {
      const TimeGrid t = TimeGrid::uniform(24.0, level == 0 ? 600 : 1200);
      std::mt19937_64 rng(5);
      for (int trial = 0; trial < 5; ++trial) {
        const auto base = random_band_field(g, 10, 1.0, rng);
        const double om = 0.2 + 1.8 * unit_uniform(rng);
        SpaceTimeField F(g, t);
        for (int n = 0; n < t.size(); ++n)
          for (int k = 1; k <= 10; ++k) {
            const cplx v = base[k] * std::exp(-alpha * t[n] * g.frequency(k)) * std::cos(om * t[n] * k);
            F[n][k] = v;
            F[n][-k] = std::conj(v);
          }
        const double nf = balpha_norm(F, alpha);
        const double r[4] = {balpha_norm(duhamel_minus(F, ForcingMode::Dx, p), alpha) / nf,
                             balpha_norm(duhamel_minus(F, ForcingMode::Dt, p), alpha) / nf,
                             balpha_norm(duhamel_plus(F, ForcingMode::Dx, p).value, alpha) / nf,
                             balpha_norm(duhamel_plus(F, ForcingMode::Dt, p).value, alpha) / nf};
        for (int i = 0; i < 4; ++i) c[level][i] = std::max(c[level][i], r[i]);
      }
    }
    double drift = 0.0, cmax = 0.0;
    for (int i = 0; i < 4; ++i) {
      ok = ok && std::isfinite(c[1][i]);
      drift = std::max(drift, std::abs(c[1][i] - c[0][i]) / c[1][i]);
      cmax = std::max(cmax, c[1][i]);
    }
    ok = ok && drift <= 0.02;
    detail += fmt("a=%.2f: max C %.3f, refinement drift %.1e; ", a, cmax, drift);
  }
  verdict(id, name, ok, detail + "alpha = 0.4 sqrt(1-a^2)/2, drift tol 2%");
}

void global_runs(int id, const char* name, SolutionBundle*& keep) {
  std::string detail;
  bool ok = true;
  for (double a : {0.0, 0.3}) {
    const auto c = global_config(a);
    auto* b = new SolutionBundle(picard_solve(c));
    const double ratio = b->contraction_ratios.empty() ? 0.0 : b->contraction_ratios.back();
    const double decay_y = b->sup_y.front() / b->sup_y.back();
    const double decay_w = b->sup_omega.front() / b->sup_omega.back();
    ok = ok && b->converged && ratio < 0.5 && b->residual_norm < 1e-8 && decay_y >= 10 && decay_w >= 10;
    detail += fmt("a=%.1f: ratio %.2e, residual %.2e, decay %.1e; ", a, ratio, b->residual_norm,
                  std::min(decay_y, decay_w));
    if (a == 0.3) keep = b;
    else delete b;
  }
  verdict(id, name, ok, detail + "need ratio < 0.5, residual < 1e-8, decay >= 10");
}

void analyticity(int id, const char* name, const SolutionBundle* b) {
  if (!b) throw std::runtime_error("a = 0.3 run unavailable");
  const double alpha = global_config(0.3).params.alpha;
  const int M = b->y_x.size() - 1;
  std::vector<double> t, r;
  for (int n = M / 3; n <= 2 * M / 3; ++n) {
    t.push_back(b->y_x.times()[n]);
    r.push_back(analyticity_fit(b->y_x[n]));
  }
  Eigen::MatrixXd A(t.size(), 2);
  Eigen::VectorXd y(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = t[i];
    y(i) = r[i];
  }
  const Eigen::Vector2d coef = A.colPivHouseholderQr().solve(y);
  const double rho0 = analyticity_fit(b->y_x[0]);
  bool above = true;
  for (std::size_t i = 0; i < t.size(); ++i) above = above && r[i] >= rho0 + 0.8 * alpha * t[i];
  verdict(id, name, coef(1) >= 0.8 * alpha && above,
          fmt("slope of rho_hat over t in [%.2f, %.2f]: %.3f (need >= 0.8 alpha = %.3f); rho_hat >= rho_hat(0) + "
              "0.8 alpha t at all middle nodes",
              t.front(), t.back(), coef(1), 0.8 * alpha) +
              (above ? "" : " (violated)"));
}

void local_run(int id, const char* name) {
  const auto c = local_config();
  const auto b = picard_solve(c);
  const TimeGrid out = leading(b.y_x.times(), c.horizon);
  const auto [y, w] = oracle_rk4_vortex(b.y_x[0], b.omega[0], c.params, out, 1e-3);
  const double gap = std::max(max_gap(y, b.y_x, out.size()), max_gap(w, b.omega, out.size()));
  const auto g = low_mode_growth(b, c.params, c.horizon);
  verdict(id, name, b.converged && gap <= 1e-4 && g.worst_ratio <= 1.05 && g.low_modes > 0,
          fmt("RK4 gap on [0, 0.5] %.2e (tol 1e-4); %.0f low modes, measured rate C = %.3f, worst |V(t)|/(e^{Ct}|V(0)|) "
              "%.4f (tol 1.05)",
              gap, g.low_modes, g.rate, g.worst_ratio));
}

void muskat(int id, const char* name) {
  const auto c = muskat_config();
  const auto s = muskat_picard_solve(c);
  int n1 = -1;
  for (int n = 0; n < s.f_x.size(); ++n)
    if (std::abs(s.f_x.times()[n] - 1.0) < 1e-12) n1 = n;
  if (n1 < 0) throw std::runtime_error("t = 1 is not a node");
  const auto r = oracle_rk4_muskat(s.f_x[0], c.density_gap, leading(s.f_x.times(), 1.0), 1e-3);
  const double gap = b0_norm(r[n1] - s.f_x[n1]);
  bool monotone = true;
  for (std::size_t n = 1; n < s.b0_profile.size(); ++n) monotone = monotone && s.b0_profile[n] <= s.b0_profile[n - 1];
  auto lin = c;
  lin.nonlinear = false;
  const auto l = muskat_picard_solve(lin);
  double lin_err = 0.0;
  const auto& g = l.f_x.grid();
  for (int n = 0; n < l.f_x.size(); ++n)
    for (int k = g.k_min() + 1; k <= g.k_max(); ++k)
      lin_err = std::max(lin_err, std::abs(l.f_x[n][k] - std::exp(-std::abs(k) * l.f_x.times()[n]) * l.f_x[0][k]));
  verdict(id, name, s.converged && gap <= 1e-6 && monotone && lin_err <= 1e-12,
          fmt("converged in %.0f sweeps; RK4 gap at t = 1 %.2e (tol 1e-6); linear decay error %.2e (tol 1e-12)",
              s.iterations, gap, lin_err) +
              (monotone ? "; B0 nonincreasing" : "; B0 increases"));
}

void determinism(int id, const char* name) {
  RunConfig cfg;
  cfg.vortex = global_config(0.3);
  cfg.vortex.n_modes = 32;
  const auto base = std::filesystem::temp_directory_path() / "vsheet_acceptance";
  std::filesystem::remove_all(base);
  const auto o1 = run(cfg, base / "a"), o2 = run(cfg, base / "b");
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  bool identical = o1.exit_code == 0 && o2.exit_code == 0;
  for (const char* f : {"solution_y_x.csv", "solution_omega.csv", "norms.csv", "plotdata.csv"})
    identical = identical && slurp(base / "a" / f) == slurp(base / "b" / f);

  const auto b = picard_solve(cfg.vortex);
  std::stringstream ss;
  write_csv(ss, b.omega);
  const auto back = read_spacetime_csv(ss, b.omega.grid());
  bool exact = back.times() == b.omega.times();
  for (int n = 0; n < b.omega.size() && exact; ++n)
    for (int k = b.omega.grid().k_min(); k <= b.omega.grid().k_max(); ++k) exact = exact && back[n][k] == b.omega[n][k];
  std::filesystem::remove_all(base);
  verdict(id, name, identical && exact,
          std::string("repeated runs byte-identical: ") + (identical ? "yes" : "no") +
              "; CSV re-ingestion bit-exact: " + (exact ? "yes" : "no"));
}

}  // namespace

int main() {
  criterion(1, "multiplier exactness", multipliers);
  criterion(2, "operator backend equivalence", backends);
  criterion(3, "inequality suite", inequalities);
  criterion(4, "linear solver fidelity", linear_fidelity);
  criterion(5, "Duhamel bounds in B_alpha", lemma_bounds);
  SolutionBundle* kept = nullptr;
  criterion(6, "global small-data convergence", [&](int id, const char* n) { global_runs(id, n, kept); });
  criterion(7, "instant analyticity", [&](int id, const char* n) { analyticity(id, n, kept); });
  delete kept;
  criterion(8, "local a < 0 run", local_run);
  criterion(9, "Muskat", muskat);
  criterion(10, "determinism and round-trip", determinism);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
